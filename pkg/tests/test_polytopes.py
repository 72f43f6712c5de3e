from __future__ import annotations

from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import two_block
from stabenv.envelopes import envelope_matrix
from stabenv.laurent import RationalFn
from stabenv.polytopes import degree_axiom_check, degree_compare, empty, hull, minkowski, point, shift_of, translate
from stabenv.torus_fixed import FixedComponent
from stabenv.quiver import Block, QuiverData
from stabenv.torus_fixed import TorusFixed


def comp(*ks: int) -> FixedComponent:
    return FixedComponent((tuple(ks),))


def test_hull_minkowski_translate_examples():
    seg = hull([(0, 0), (1, -1), (Fraction(1, 2), Fraction(-1, 2))], 2)
    assert seg == hull([(0, 0), (1, -1)], 2)
    assert len(seg.vertices) == 2
    assert minkowski(hull([(0, 0), (1, -1)], 2), point((2, 0))) == hull([(2, 0), (3, -1)], 2)
    s = Fraction(3, 4)
    assert translate(point((0, 0)), (-1 + s, 1)) == point((s - 1, 1))


def test_square_and_interior_points():
    sq = hull([(0, 0), (1, 0), (0, 1), (1, 1), (Fraction(1, 2), Fraction(1, 3))], 2)
    assert len(sq.vertices) == 4
    assert sq.contains((Fraction(1, 2), Fraction(1, 2)))
    assert not sq.contains((2, 0))
    assert hull([(0, 0), (1, 1)], 2).strict_subset(sq)
    assert not sq.strict_subset(sq)


def test_shift_examples():
    tf = two_block(1, 2)
    s = Fraction(3, 4)
    assert shift_of(tf, comp(1, 0), (1, -1), s) == (s - 1, 1)
    assert shift_of(tf, comp(0, 0), (1, -1), s) == (0, 0)
    data = QuiverData.from_blocks(("0",), (), [Block((1,), (2,), None)], (), "out", (-1,))
    triv = TorusFixed(data, [(1,)])
    assert shift_of(triv, triv.components[0], (), s) == ()


def test_degree_axiom_examples():
    tf = two_block(1, 2)
    M = envelope_matrix(tf, (1, -1), "3/4")
    a, b = comp(0, 1), comp(1, 0)
    assert degree_axiom_check(M.entry(a, b), tf, a, b, (1, -1), "3/4")[0] == "strict"
    zero = RationalFn(tf.reg.zero())
    assert degree_axiom_check(zero, tf, a, b, (1, -1), "3/4")[0] == "strict"
    assert degree_axiom_check(M.entry(b, b), tf, b, b, (1, -1), "3/4")[0] == "non-strict"
    bad = M.entry(b, b) * RationalFn(tf.reg.monomial({"a1": 1}))
    assert degree_axiom_check(bad, tf, b, b, (1, -1), "3/4")[0] == "violated"


pts = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=1, max_size=6)


@given(pts, pts, pts)
@settings(max_examples=50, deadline=None)
def test_polytope_laws(p, q, r):
    P, Q, R = hull(p, 2), hull(q, 2), hull(r, 2)
    assert hull(P.vertices, 2) == P
    assert minkowski(P, Q) == minkowski(Q, P)
    assert minkowski(minkowski(P, Q), R) == minkowski(P, minkowski(Q, R))
    assert translate(P, (0, 0)) == P
    assert degree_compare(empty(2), P) == "strict"
