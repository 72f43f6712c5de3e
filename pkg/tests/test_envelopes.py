from __future__ import annotations

import math
from fractions import Fraction
from itertools import permutations

import pytest

from conftest import poly, three_factor, two_block
from stabenv.envelopes import (EnvelopeError, GenericityError, NakajimaFixed, Normalizer, Slope,
                               apply_normalizer, attracting_rank, check_duality, check_triangle,
                               check_ybe, envelope_matrix, hall_envelope_class, matrix_from_json,
                               nakajima_minuscule_matrix, nearest_integer, polarization_normalizer,
                               rmatrix, tautological_restrictions, verify_axioms)
from stabenv.laurent import FracMatrix, RationalFn, identity_rf, mat_equal, mat_mul, rf_equal
from stabenv.quiver import Block, QuiverData
from stabenv.torus_fixed import ChamberError, FixedComponent, TorusFixed, normal_decompose

C00, C01, C10, C11 = (FixedComponent(((a, b),)) for a, b in ((0, 0), (0, 1), (1, 0), (1, 1)))


def golden(tf: TorusFixed, greater: bool, n: int) -> list[list[RationalFn]]:
    """The displayed 4x4 matrices with (a2/a1)^n standing for (a2/a1)^floor(s - 1/2)."""
    reg = tf.reg
    P = lambda t: RationalFn(poly(reg, t))
    z = P("0")
    if greater:
        twist = reg.monomial({"a1": -n, "a2": n})
        return [[P("1"), z, z, z],
                [z, P("1 - a1/a2"), RationalFn(twist) * P("(1-h)^2"), z],
                [z, z, P("(1 - h*a1/a2)^2"), z],
                [z, z, z, P("(1 - h*a1/a2)^2")]]
    twist = reg.monomial({"a1": n, "a2": -n})
    return [[P("1"), z, z, z],
            [z, P("(1 - h*a2/a1)^2"), z, z],
            [z, RationalFn(twist) * P("(1-h)^2"), P("1 - a2/a1"), z],
            [z, z, z, P("(1 - h*a2/a1)^2")]]


@pytest.mark.parametrize("s", ["3/4", "7/4", "-1/4", "1/3", "-9/4", "5/3"])
def test_golden_matrices_all_slopes(gr12, s):
    n = math.floor(Fraction(s) - Fraction(1, 2))
    assert mat_equal(envelope_matrix(gr12, (1, -1), s).entries, golden(gr12, True, n))
    assert mat_equal(envelope_matrix(gr12, (-1, 1), s).entries, golden(gr12, False, n))


def test_slope_walls(gr12):
    assert nearest_integer(Fraction(3, 4)) == 1
    assert nearest_integer(Fraction(-3, 4)) == -1
    with pytest.raises(GenericityError):
        nearest_integer(Fraction(1, 2))
    with pytest.raises(GenericityError):
        envelope_matrix(gr12, (1, -1), "1/2")
    with pytest.raises(ChamberError):
        envelope_matrix(gr12, (2, 2), "1/3")
    with pytest.raises(EnvelopeError):
        Slope.of("1/3,1/4", 1)


def test_hall_class_is_weyl_invariant(gr12):
    for F in gr12.components:
        for xi in ((1, -1), (-1, 1)):
            assert hall_envelope_class(gr12, F, xi, "1/3").is_weyl_invariant()


def test_twist_covariance(gr12):
    """Raising the slope by 1 conjugates by the restrictions of det V."""
    for xi in ((1, -1), (-1, 1)):
        M0 = envelope_matrix(gr12, xi, "1/3")
        M1 = envelope_matrix(gr12, xi, "4/3")
        L = [tautological_restrictions(gr12, F, F.v, [(1,) * F.v[0]]) for F in M0.index]
        for r in range(4):
            for c in range(4):
                lhs = M1.entries[r][c] * RationalFn(L[c])
                assert rf_equal(lhs, M0.entries[r][c] * RationalFn(L[r]))


def test_apply_normalizer(gr12):
    M = envelope_matrix(gr12, (1, -1), "3/4")
    reg = gr12.reg
    nz = Normalizer("K", {C10: -reg.monomial({"h": "1/2"})})
    N = apply_normalizer(M, nz)
    assert rf_equal(N.entry(C01, C10), M.entry(C01, C10) * RationalFn(-reg.monomial({"h": "1/2"})))
    assert rf_equal(N.entry(C01, C01), M.entry(C01, C01))
    assert verify_axioms(N)["ok"]
    with pytest.raises(EnvelopeError):
        apply_normalizer(M, Normalizer("K", {C10: reg.const(2)}))
    with pytest.raises(EnvelopeError):
        apply_normalizer(M, Normalizer("coh", {C10: 1}))


def test_rmatrix_properties(gr12):
    Mg = envelope_matrix(gr12, (1, -1), "1/3")
    Ml = envelope_matrix(gr12, (-1, 1), "1/3")
    reg = Mg.reg
    Id = identity_rf(reg, 4)
    assert mat_equal(rmatrix(Mg, Mg), Id)
    assert mat_equal(mat_mul(rmatrix(Ml, Mg), rmatrix(Mg, Ml)), Id)
    assert mat_equal(mat_mul(Ml.entries, rmatrix(Ml, Mg)), Mg.entries)


FAMILIES = [(1, 2), (1, 1), (1, 0)]


@pytest.mark.parametrize("d", FAMILIES)
@pytest.mark.parametrize("theory,slopes", [("K", ["3/4", "1/3", "-5/4", "11/6"]), ("coh", [0])])
def test_axioms_two_blocks(d, theory, slopes):
    tf = two_block(*d)
    for xi in ((1, -1), (-1, 1), (3, -2)):
        for s in slopes:
            assert verify_axioms(envelope_matrix(tf, xi, s, theory))["ok"]


@pytest.mark.parametrize("d", [(1, 1), (1, 0)])
def test_axioms_three_blocks(d):
    tf = three_factor(*d).setup()
    for xi in permutations((3, 2, 1)):
        for theory, s in (("K", "1/3"), ("K", "3/4"), ("coh", 0)):
            assert verify_axioms(envelope_matrix(tf, xi, s, theory))["ok"]


def test_asymmetric_three_blocks_fail_degree_axiom():
    """With d_in < d_out the Hall envelope of a full chamber is not a stable envelope."""
    tf = three_factor(1, 2).setup()
    for theory, s in (("K", "1/3"), ("coh", 0)):
        rep = verify_axioms(envelope_matrix(tf, (3, 2, 1), s, theory))
        assert rep["support"]["ok"] and rep["normalization"]["ok"]
        assert not rep["degree"]["ok"]
        assert [(w["row"], w["column"]) for w in rep["degree"]["witnesses"]] == \
            [("[001]", "[100]"), ("[011]", "[110]")]


def test_mutations_are_detected(gr12):
    M = envelope_matrix(gr12, (1, -1), "3/4")
    reg = M.reg

    def mutated(r: int, c: int, f) -> dict:
        rows = [list(row) for row in M.entries]
        rows[r][c] = f(rows[r][c])
        return verify_axioms(type(M)(M.index, rows, M.chamber, M.slope, M.theory, M.mu, None, M.setup))

    rep = mutated(2, 1, lambda x: RationalFn(reg.one()))
    assert not rep["support"]["ok"] and rep["support"]["witness"]["row"] == "[10]"
    rep = mutated(1, 1, lambda x: x * RationalFn(reg.var("h")))
    assert not rep["normalization"]["ok"]
    rep = mutated(1, 2, lambda x: x * RationalFn(reg.monomial({"a1": 2, "a2": -2})))
    assert not rep["degree"]["ok"]
    rep = mutated(1, 2, lambda x: x * RationalFn(reg.monomial({"a1": 1, "a2": -1})))
    assert rep["degree"]["witnesses"][0]["verdict"] == "violated"
    assert mutated(1, 2, lambda x: x)["ok"]


def test_ybe_shifted_fails_for_asymmetric():
    r = check_ybe(three_factor(1, 2), "3/4", shifted=True)
    assert r["verdict"] == "unequal"
    assert (r["witness"]["row"], r["witness"]["column"]) == ("[001]", "[010]")
    assert r["witness"]["lhs"] != r["witness"]["rhs"]


@pytest.mark.parametrize("s", ["1/3", "3/4", "-2/5"])
def test_ybe_plain_symmetric(s):
    assert check_ybe(three_factor(1, 1), s)["verdict"] == "equal"


@pytest.mark.parametrize("d,shifted,normalization,verdict", [
    ((1, 1), False, "hall", "unequal"),
    ((1, 1), True, "hall", "equal"),
    ((1, 1), True, "polarization", "unequal"),
    ((1, 2), False, "hall", "unequal"),
    ((1, 2), False, "polarization", "unequal"),
    ((1, 2), True, "polarization", "unequal"),
    ((1, 0), False, "hall", "equal"),
    ((1, 0), True, "hall", "equal"),
])
def test_ybe_variants(d, shifted, normalization, verdict):
    assert check_ybe(three_factor(*d), "1/3", shifted, normalization)["verdict"] == verdict


def test_triangle_symmetric_all_faces():
    tf = three_factor(1, 1).setup()
    for xi in permutations((3, 2, 1)):
        top = tuple(1 if x == 3 else 0 for x in xi)
        top_two = tuple(1 if x > 1 else 0 for x in xi)
        for face in (top, top_two):
            assert check_triangle(tf, xi, face, "1/3")["verdict"] == "equal"


def test_triangle_asymmetric():
    tf = three_factor(1, 2).setup()
    r = check_triangle(tf, (3, 2, 1), (1, 1, 0), "1/3")
    assert r["verdict"] == "unequal" and r["witness"]["row"] == "[001]" and r["witness"]["column"] == "[100]"
    assert check_triangle(tf, (3, 2, 1), (1, 0, 0), "1/3")["verdict"] == "equal"
    assert check_triangle(tf, (3, 2, 1), (3, 2, 1), "1/3")["verdict"] == "equal"


def test_triangle_d_in_at_least_d_out():
    tf = three_factor(1, 0).setup()
    for face in ((1, 1, 0), (1, 0, 0)):
        assert check_triangle(tf, (3, 2, 1), face, "1/3")["verdict"] == "equal"


@pytest.mark.parametrize("d", FAMILIES)
@pytest.mark.parametrize("theory", ["K", "coh"])
def test_duality_identity(d, theory):
    tf = two_block(*d)
    for xi in ((1, -1), (-1, 1)):
        assert check_duality(tf, xi, "1/3", theory)["verdict"] == "identity"


def test_duality_without_hbar():
    assert check_duality(two_block(1, 1, hbar="none"), (1, -1), "1/3")["verdict"] == "identity"


def test_integrality_reports():
    r = check_duality(two_block(1, 0), (1, -1), "1/3")
    assert r["hypothesis_nonpositive"] and r["inverse_polynomial"]
    r = check_duality(two_block(1, 2), (1, -1), "3/4")
    assert not r["hypothesis_nonpositive"] and not r["inverse_polynomial"]
    assert r["inverse_witness"]["row"] == "[01]"


def a1_two_block() -> NakajimaFixed:
    gamma = QuiverData.from_blocks(("0",), (), [Block((1,), (0,), "a1"), Block((1,), (0,), "a2")],
                                   (), "none", (-1,))
    return NakajimaFixed(gamma, [(0,), (1,), (2,)])


def test_nakajima_a1_matrix():
    nf = a1_two_block()
    reg = nf.reg
    assert [F.label() for F in nf.components] == ["[00]", "[01]", "[10]", "[11]"]
    M = nakajima_minuscule_matrix(nf, (1, -1), "1/3")
    P = lambda t: RationalFn(poly(reg, t))
    hh = reg.monomial({"h": "1/2"})
    assert rf_equal(M.entry(C01, C01), P("1 - a1/a2"))
    assert rf_equal(M.entry(C10, C10), RationalFn(hh - reg.monomial({"a1": -1, "a2": 1, "h": "-1/2"})))
    assert rf_equal(M.entry(C01, C10), RationalFn(hh - hh ** -1))
    assert M.entry(C10, C01).is_zero()
    assert verify_axioms(M)["ok"]
    assert verify_axioms(nakajima_minuscule_matrix(nf, (-1, 1), "1/3"))["ok"]


def test_nakajima_prefactor_rank_matches_count():
    nf = a1_two_block()
    for xi, expected in (((1, -1), {C10: 1}), ((-1, 1), {C01: 1})):
        for F in nf.components:
            half = nf.restrict(nf.half(F.v), F)
            count = sum(m for k, m in half.counts.items() if sum(x * w for x, w in zip(xi, nf.a_wt(k))) > 0)
            assert attracting_rank(nf, F, xi) == count == expected.get(F, 0)


def test_polarization_normalizer_signs(gr12):
    nz = polarization_normalizer(gr12, (1, -1))
    for F in gr12.components:
        x = nz.value(F, gr12.reg)
        assert x.is_monomial() and abs(next(iter(x.terms.values()))) == 1


def test_matrix_json_roundtrip(gr12):
    M = envelope_matrix(gr12, (1, -1), "3/4")
    assert mat_equal(matrix_from_json(M.reg, M.to_json()), M.entries)
    assert "pmatrix" in M.to_latex()
    assert FracMatrix.from_rf(M.entries).equals(M.to_frac())[0]


def test_normal_bundle_matches_diagonal(gr12):
    from stabenv.euler import euler_class
    M = envelope_matrix(gr12, (1, -1), "3/4")
    for F in M.index:
        _, minus, _ = normal_decompose(gr12, F, (1, -1))
        assert rf_equal(M.entry(F, F), euler_class(minus))
