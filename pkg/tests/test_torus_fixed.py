from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import poly, two_block
from stabenv.euler import euler_class
from stabenv.laurent import RationalFn, rf_equal
from stabenv.quiver import Block, QuiverData
from stabenv.torus_fixed import (ChamberError, FixedComponent, TorusFixed, ample_compare,
                                 duality_check, enumerate_fixed_components, normal_decompose,
                                 roots, validate_chamber)


def comp(*ks: int) -> FixedComponent:
    return FixedComponent((tuple(ks),))


def three_blocks(d_in: int, d_out: int, vmax: int = 3) -> TorusFixed:
    blocks = [Block((d_in,), (d_out,), f"a{i}") for i in (1, 2, 3)]
    data = QuiverData.from_blocks(("0",), (), blocks, (), "out", (-1,))
    return TorusFixed(data, [(k,) for k in range(vmax + 1)])


def test_three_factor_components():
    tf = three_blocks(1, 2)
    labels = [F.label() for F in tf.components]
    assert sorted(labels) == sorted(f"[{a}{b}{c}]" for a in (0, 1) for b in (0, 1) for c in (0, 1))


def test_index_order(gr12):
    assert [F.label() for F in gr12.components] == ["[00]", "[01]", "[10]", "[11]"]


def test_trivial_torus_single_component():
    data = QuiverData.from_blocks(("0",), (), [Block((1,), (2,), None)], (), "out", (-1,))
    tf = TorusFixed(data, [(1,)])
    assert tf.trivial and len(tf.components) == 1
    F = tf.components[0]
    plus, minus, fixed = normal_decompose(tf, F, ())
    assert plus.rank() == 0 and minus.rank() == 0
    assert roots(tf) == []
    validate_chamber(tf, ())


def test_one_block_v2_is_empty():
    data = QuiverData.from_blocks(("0",), (), [Block((1,), (2,), "a")], (), "out", (-1,))
    assert enumerate_fixed_components(data, [(2,)]) == []


def test_normal_bundle_examples(gr12):
    reg = gr12.reg
    _, minus, _ = normal_decompose(gr12, comp(1, 0), (1, -1))
    assert rf_equal(euler_class(minus), RationalFn(poly(reg, "(1 - h*a1/a2)^2")))
    _, minus, _ = normal_decompose(gr12, comp(0, 1), (1, -1))
    assert rf_equal(euler_class(minus), RationalFn(poly(reg, "1 - a1/a2")))


def test_roots(gr12):
    assert roots(gr12) == [(1, -1)]
    assert roots(three_blocks(1, 2)) == [(0, 1, -1), (1, -1, 0), (1, 0, -1)]
    with pytest.raises(ChamberError):
        validate_chamber(gr12, (1, 1))
    with pytest.raises(ChamberError):
        validate_chamber(gr12, (1,))


def test_ample_compare_examples(gr12):
    theta = (-1,)
    assert ample_compare(gr12, comp(1, 0), comp(0, 1), theta, (1, -1)) == "less"
    assert ample_compare(gr12, comp(1, 0), comp(1, 0), theta, (1, -1)) == "equal"
    # weights 0 and a1 + a2: the sign of <xi, a1 + a2> decides
    assert ample_compare(gr12, comp(0, 0), comp(1, 1), theta, (1, -1)) == "equal"
    assert ample_compare(gr12, comp(0, 0), comp(1, 1), theta, (2, -1)) == "greater"


def test_duality_check_examples():
    one = lambda di, do: QuiverData.from_blocks(("0",), (), [Block((di,), (do,), "a")], (), "out", (-1,))
    assert duality_check(one(1, 1)) == "self-dual"
    assert duality_check(two_block(1, 2).data) == "pseudo-self-dual"
    two_in = QuiverData.from_blocks(("0",), (), [Block((1,), (0,), "a1"), Block((1,), (0,), "a2")],
                                    (), "out", (-1,))
    assert duality_check(two_in) == "neither"


xis = st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5)).filter(
    lambda x: len(set(x)) == 3)


@given(xis)
@settings(max_examples=25, deadline=None)
def test_normal_bundle_properties(xi):
    for tf, self_dual in ((three_blocks(1, 2), False), (three_blocks(1, 1), True)):
        for F in tf.components:
            plus, minus, fixed = normal_decompose(tf, F, xi)
            plus2, minus2, _ = normal_decompose(tf, F, tuple(-x for x in xi))
            assert plus == minus2 and minus == plus2
            assert plus + minus + fixed == tf.tangent_at(F)
            if self_dual:
                assert plus.rank() == minus.rank()


@given(xis)
@settings(max_examples=25, deadline=None)
def test_ample_order_properties(xi):
    tf = three_blocks(1, 2)
    theta = (-1,)
    cs = tf.components
    flip = {"less": "greater", "greater": "less", "equal": "equal"}
    for F in cs:
        for G in cs:
            assert ample_compare(tf, F, G, theta, xi) == flip[ample_compare(tf, G, F, theta, xi)]
            for H in cs:
                if ample_compare(tf, F, G, theta, xi) == "less" == ample_compare(tf, G, H, theta, xi):
                    assert ample_compare(tf, F, H, theta, xi) == "less"


def test_shared_torus_variable_is_flagged():
    blocks = [Block((1,), (1,), "a"), Block((1,), (1,), "a"), Block((1,), (1,), "b")]
    data = QuiverData.from_blocks(("0",), (), blocks, (), "out", (-1,))
    tf = TorusFixed(data, [(1,)])
    assert tf.flags and "share the torus variable a" in tf.flags[0]
    assert [F.label() for F in tf.components] == ["[01]", "[10]"]
    assert not tf.is_residual_free(tf.components[1])
    assert tf.is_residual_free(tf.components[0])
