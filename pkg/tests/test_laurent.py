from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import poly, two_block
from stabenv.envelopes import envelope_matrix
from stabenv.laurent import (LaurentError, LaurentExpr, RationalFn, Var,
                             VariableRegistry, identity_rf, lp_arith, lp_substitute,
                             mat_equal, mat_inverse, mat_mul, rf_equal)
from stabenv.polytopes import hull, minkowski

REG = VariableRegistry([Var("a1", "torus-A", -1, 0), Var("a2", "torus-A", -1, 1),
                        Var("h", "flavour", -1, 0), Var("x", "gauge-chern-root", 0, 0)])


def P(text: str) -> LaurentExpr:
    return poly(REG, text)


def R(num: str, den: str = "1") -> RationalFn:
    return RationalFn(P(num), P(den))


# random small expressions over a1, a2, h
exps = st.integers(min_value=-2, max_value=2)
terms = st.tuples(exps, exps, exps, st.integers(min_value=-3, max_value=3))


@st.composite
def laurent(draw, max_terms: int = 3) -> LaurentExpr:
    out = REG.zero()
    for e1, e2, e3, c in draw(st.lists(terms, max_size=max_terms)):
        out = out + REG.monomial({"a1": e1, "a2": e2, "h": e3}, c)
    return out


@st.composite
def nonzero_laurent(draw) -> LaurentExpr:
    e = draw(laurent())
    return e if not e.is_zero() else REG.one()


def test_registry_order_and_kinds():
    reg = VariableRegistry([Var("x0_0", "gauge-chern-root", 0, 0), Var("h", "flavour"),
                            Var("a2", "torus-A", -1, 1), Var("a1", "torus-A", -1, 0)])
    assert reg.names == ["a1", "a2", "h", "x0_0"]
    assert reg.torus_indices == (0, 1)
    with pytest.raises(LaurentError):
        VariableRegistry([Var("a", "torus-A"), Var("a", "flavour")])
    with pytest.raises(LaurentError):
        VariableRegistry([Var("a", "bogus")])


def test_arith_examples():
    assert lp_arith(P("1 - a1/a2"), 2, "pow") == P("1 - 2*a1/a2 + a1^2*a2^-2")
    assert lp_arith(P("x"), P("x^-1"), "mul") == REG.one()
    assert lp_arith(P("1 - h"), P("1 - h"), "mul") == P("1 - 2*h + h^2")
    assert lp_arith(P("a1"), P("a1"), "sub").is_zero()


def test_negative_power_of_non_monomial():
    with pytest.raises(LaurentError):
        P("1 - h") ** -1
    assert P("2*a1") ** -1 == REG.monomial({"a1": -1}, Fraction(1, 2))


def test_half_exponents():
    e = REG.monomial({"h": "1/2"})
    assert e * e == P("h")
    with pytest.raises(LaurentError):
        REG.monomial({"h": "1/3"})


def test_substitute_examples():
    assert lp_substitute(P("1 - h*x/a2"), {"x": P("a1")}) == P("1 - h*a1/a2")
    assert lp_substitute(P("1 - a1/a2"), {"a1": 1, "a2": 1}).is_zero()
    assert lp_substitute(REG.monomial({"x": "1/2"}), {"x": 1}) == REG.one()
    assert lp_substitute(REG.monomial({"x": "1/2"}), {"x": 4}) == REG.const(2)


def test_substitute_half_exponent_on_bad_target():
    with pytest.raises(LaurentError):
        lp_substitute(REG.monomial({"x": "1/2"}), {"x": P("1 + a1")})
    with pytest.raises(LaurentError):
        lp_substitute(REG.monomial({"x": "1/2"}), {"x": REG.monomial({"a1": "1/2"})})


def test_rf_equal_examples():
    assert rf_equal(R("a1/a2"), R("a1", "a2"))
    assert not rf_equal(R("1 - a1/a2"), R("0"))
    num = P("(1-h)^2*(1-a2/a1)")
    den = P("(1-h*a1/a2)*(1-h*a2/a1)")
    s = P("a1*a2")
    assert rf_equal(RationalFn(num, den), RationalFn(num * s, den * s))


def test_rational_zero_denominator():
    with pytest.raises(ZeroDivisionError):
        RationalFn(REG.one(), REG.zero())


def test_mat_inverse_examples():
    I4 = identity_rf(REG, 4)
    assert mat_equal(mat_inverse(I4), I4)
    f, g = R("1 - h"), R("a1 - a2", "h")
    z = RationalFn(REG.zero())
    inv = mat_inverse([[f, z], [z, g]])
    assert mat_equal(inv, [[RationalFn(REG.one()) / f, z], [z, RationalFn(REG.one()) / g]])


def test_mat_inverse_singular():
    f = R("1 - h")
    with pytest.raises(ZeroDivisionError):
        mat_inverse([[f, f], [f, f]])


def test_mat_inverse_envelope_matrix():
    M = envelope_matrix(two_block(1, 2), (1, -1), "3/4").entries
    Id = identity_rf(M[0][0].reg, 4)
    inv = mat_inverse(M)
    assert mat_equal(mat_mul(inv, M), Id)
    assert mat_equal(mat_mul(M, inv), Id)


def test_a_degree_examples():
    assert P("(1-h)^2").a_degree() == hull([(0, 0)], 2)
    assert P("1 - a1/a2").a_degree() == hull([(0, 0), (1, -1)], 2)
    assert REG.zero().a_degree().is_empty()
    assert P("1 - a1/a2").a_degree_along((1, -1)) == (0, 2)
    assert REG.zero().a_degree_along((1, 0)) is None


def test_json_roundtrip():
    e = P("1 - 2*h*a1/a2") * REG.monomial({"h": "1/2"}, Fraction(3, 5))
    assert LaurentExpr.from_json(REG, e.to_json()) == e
    r = R("1 - h", "a1 - a2")
    assert rf_equal(RationalFn.from_json(REG, r.to_json()), r)
    assert e.to_json() == LaurentExpr.from_json(REG, e.to_json()).to_json()


@given(laurent(), laurent(), laurent())
@settings(max_examples=60, deadline=None)
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a + b == b + a
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == REG.zero()


@given(nonzero_laurent(), nonzero_laurent())
@settings(max_examples=60, deadline=None)
def test_newton_polytope_of_product(f, g):
    assert (f * g).a_degree() == minkowski(f.a_degree(), g.a_degree())


@given(laurent(), laurent(), st.integers(-2, 2), st.integers(-2, 2))
@settings(max_examples=60, deadline=None)
def test_substitute_commutes_with_arith(f, g, p, q):
    m = {"a1": REG.monomial({"a2": p, "h": q}), "h": REG.monomial({"a1": q})}
    assert lp_substitute(f * g, m) == lp_substitute(f, m) * lp_substitute(g, m)
    assert lp_substitute(f + g, m) == lp_substitute(f, m) + lp_substitute(g, m)


@st.composite
def invertible(draw, n: int):
    """Entries num/monomial; a dominant diagonal monomial keeps the determinant nonzero."""
    M = []
    for i in range(n):
        row = []
        for j in range(n):
            e1, e2, e3 = draw(st.tuples(exps, exps, exps))
            row.append(RationalFn(draw(laurent(2)), REG.monomial({"a1": e1, "a2": e2, "h": e3})))
        M.append(row)
    for i in range(n):
        M[i][i] = M[i][i] + RationalFn(REG.monomial({"a1": 9 + i, "h": 9}))
    return M


@pytest.mark.parametrize("n", [2, 3])
@given(data=st.data())
@settings(max_examples=15, deadline=None)
def test_inverse_property(n, data):
    M = data.draw(invertible(n))
    inv = mat_inverse(M)
    Id = identity_rf(REG, n)
    assert mat_equal(mat_mul(M, inv), Id)
    assert mat_equal(mat_mul(inv, M), Id)
