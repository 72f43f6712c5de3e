from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabenv.kn_strata import (kn_stratify, mu_invariant, semistable_nonempty, sigma_theta,
                               window_bounds)
from stabenv.quiver import Block, FramedQuiver, QuiverData, QuiverError

ONE = FramedQuiver(("0",), (), (1,), (2,), (-1,))


def test_semistable_examples():
    assert semistable_nonempty(ONE, (1,)) == "nonempty"
    assert semistable_nonempty(ONE, (2,)) == "empty"
    assert semistable_nonempty(ONE, (0,)) == "nonempty"
    with pytest.raises(QuiverError):
        semistable_nonempty(FramedQuiver(("0",), (), (1,), (2,), (1,)), (1,))


def test_semistable_with_arrows():
    # A2 with framing at the source: generation reaches the second node through the arrow
    Q = FramedQuiver(("1", "2"), ((0, 1),), (1, 0), (0, 0), (-1, -1))
    assert semistable_nonempty(Q, (1, 1)) == "nonempty"
    assert semistable_nonempty(Q, (0, 1)) == "empty"
    assert semistable_nonempty(Q, (1, 2)) in ("empty", "empty(heuristic)")
    # Jordan quiver: x, Ax, A^2x span C^3 for generic A
    J = FramedQuiver(("0",), ((0, 0),), (1,), (0,), (-1,))
    assert semistable_nonempty(J, (3,)) == "nonempty"


def test_sigma_theta_examples():
    assert sigma_theta(ONE, (3,)) == [(3,), (2,)]
    assert sigma_theta(ONE, (0,)) == []
    assert sigma_theta(ONE, (1,)) == [(1,)]


def test_mu_examples():
    for u in range(1, 5):
        assert mu_invariant((u,), (-1,)) == (u, 1)
    assert mu_invariant((1, 0), (-1, -2)) == (1, 1)
    with pytest.raises(QuiverError):
        mu_invariant((0,), (-1,))


def test_kn_stratify_examples():
    strata = kn_stratify(ONE, (3,))
    assert [(s.u, s.mu_squared) for s in strata] == [((3,), 3), ((2,), 2)]
    assert strata[1].closure_targets == [(3,)]
    assert [s.u for s in kn_stratify(ONE, (1,))] == [(1,)]
    assert kn_stratify(ONE, (0,)) == []
    rec = strata[0].to_json()
    assert rec["u"] == [3] and rec["mu_squared"] == "3" and rec["order"] == 0


@given(st.lists(st.integers(0, 2), min_size=2, max_size=2), st.lists(st.integers(0, 2), min_size=2, max_size=2),
       st.lists(st.integers(1, 3), min_size=2, max_size=2))
@settings(max_examples=40, deadline=None)
def test_mu_monotone_and_maximal(u, u2, th):
    theta = tuple(-Fraction(t) for t in th)
    lo = tuple(min(a, b) for a, b in zip(u, u2))
    hi = tuple(max(a, b) for a, b in zip(u, u2))
    if any(lo):
        assert mu_invariant(lo, theta)[0] <= mu_invariant(hi, theta)[0]
    if any(u):
        assert mu_invariant(u, theta)[0] <= mu_invariant((2, 2), theta)[0]


@pytest.mark.parametrize("v", [(1, 1), (2, 1), (2, 2)])
def test_sigma_v_is_maximal(v):
    Q = FramedQuiver(("1", "2"), ((0, 1), (1, 0)), (1, 1), (1, 1), (-1, -1))
    us = sigma_theta(Q, v)
    assert us[0] == v
    top = mu_invariant(v, Q.theta)[0]
    assert all(mu_invariant(u, Q.theta)[0] <= top for u in us)


@given(st.integers(0, 4), st.integers(0, 4), st.integers(0, 3))
@settings(max_examples=40, deadline=None)
def test_semistable_monotone_without_arrows(m, m2, d):
    Q = FramedQuiver(("0",), (), (d,), (0,), (-1,))
    lo, hi = min(m, m2), max(m, m2)
    if semistable_nonempty(Q, (hi,)) == "nonempty":
        assert semistable_nonempty(Q, (lo,)) == "nonempty"


def sym11() -> QuiverData:
    return QuiverData.from_blocks(("0",), (), [Block((1,), (1,), "a")], (), "out", (-1,))


def test_window_examples():
    assert window_bounds(sym11(), (0,), (Fraction(1, 3),)) == []
    s = Fraction(1, 3)
    (rec,) = window_bounds(sym11(), (1,), (s,))
    # sigma-moving part of R - Lie G has rank 2; the window has length 2/2 centred at -s
    assert rec["window"] == (-Fraction(1, 2) - s, Fraction(1, 2) - s)
    data = sym11()
    reg = data.registry((1,))
    (rec,) = window_bounds(data, (1,), (Fraction(1, 4),), cls=reg.one())
    assert rec["verdict"] == "strict"
    (rec,) = window_bounds(data, (1,), (Fraction(1, 4),), cls=reg.var("x0_0") ** 3)
    assert rec["verdict"] == "violated"
