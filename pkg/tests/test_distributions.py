from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from astcert.distributions import (
    Distribution, DistributionOverflow, add, collapse, format_distribution, leq, scale, value_decomposition,
)
from astcert.syntax import App, Choice, Val, Var, Zero, encode_nat

ZERO, ONE = Val(Zero()), Val(encode_nat(1))


def test_sum():
    assert Distribution().sum() == 0
    assert Distribution({ZERO: F(1, 2), ONE: F(1, 4)}).sum() == F(3, 4)


@pytest.mark.parametrize("k", [1, 5, 20])
def test_geometric_prefix_sum(k):
    d = Distribution({encode_nat(n): F(1, 2 ** (n + 1)) for n in range(k)})
    assert d.sum() == 1 - F(1, 2**k)


def test_scale_add_leq():
    assert scale(F(1, 2), Distribution({ZERO: 1})) == Distribution({ZERO: F(1, 2)})
    assert add(Distribution({ZERO: F(1, 2)}), Distribution({ZERO: F(1, 2)})) == Distribution({ZERO: 1})
    assert leq(Distribution({ZERO: F(1, 2)}), Distribution({ZERO: F(1, 2), ONE: F(1, 4)}))
    assert not leq(Distribution({ONE: F(1, 2)}), Distribution({ZERO: F(1, 2), ONE: F(1, 4)}))


def test_add_overflow():
    with pytest.raises(DistributionOverflow):
        add(Distribution({ZERO: F(2, 3)}), Distribution({ONE: F(1, 2)}))


def test_rejects_bad_weights():
    with pytest.raises(DistributionOverflow):
        Distribution({ZERO: F(3, 2)})
    with pytest.raises(ValueError):
        Distribution({ZERO: F(-1, 2)})
    with pytest.raises(TypeError):
        Distribution({ZERO: 0.5})


def test_zero_weights_dropped():
    assert Distribution({ZERO: 0, ONE: F(1, 2)}) == Distribution({ONE: F(1, 2)})
    assert len(Distribution({ZERO: 0})) == 0


def test_value_decomposition():
    app = App(Var("f"), Var("x"))
    assert value_decomposition(Distribution({ZERO: 1})) == (Distribution({ZERO: 1}), Distribution())
    assert value_decomposition(Distribution({app: 1})) == (Distribution(), Distribution({app: 1}))
    ch = Choice(ZERO, F(1, 2), ZERO)
    d = Distribution({ZERO: F(1, 2), ch: F(1, 2)})
    assert value_decomposition(d) == (Distribution({ZERO: F(1, 2)}), Distribution({ch: F(1, 2)}))


def test_collapse():
    assert collapse([(ZERO, F(1, 2)), (ZERO, F(1, 2))]) == Distribution({ZERO: 1})
    assert collapse([]) == Distribution()
    assert collapse([("a", F(1, 3)), ("b", F(1, 3)), ("a", F(1, 6))]) == Distribution({"a": F(1, 2), "b": F(1, 3)})
    with pytest.raises(DistributionOverflow):
        collapse([("a", F(2, 3)), ("a", F(2, 3))])


def test_text_form():
    assert format_distribution(Distribution({ZERO: F(1, 2), ONE: F(1, 4)})) == "{ 0 ↦ 1/2, 1 ↦ 1/4 }"


weights = st.lists(st.tuples(st.integers(0, 5), st.fractions(0, 1, max_denominator=12)), max_size=6)


def _mk(pairs):
    total = sum(p for _, p in pairs)
    if total > 1:
        pairs = [(k, p / total) for k, p in pairs]
    return collapse(pairs)


@given(weights, st.fractions(0, 1, max_denominator=10))
def test_scale_sum(pairs, a):
    d = _mk(pairs)
    assert scale(a, d).sum() == a * d.sum()


@given(weights, weights)
def test_add_sum_and_monotone(p, q):
    d, e = _mk(p), _mk(q)
    d, e = scale(F(1, 2), d), scale(F(1, 2), e)
    s = add(d, e)
    assert s.sum() == d.sum() + e.sum()
    assert leq(d, s) and leq(e, s)


@given(weights, weights, weights)
def test_leq_partial_order(p, q, r):
    a, b, c = _mk(p), _mk(q), _mk(r)
    assert leq(a, a)
    if leq(a, b) and leq(b, a):
        assert a == b
    if leq(a, b) and leq(b, c):
        assert leq(a, c)


@given(weights)
def test_decomposition_readds(pairs):
    d = collapse([(ZERO if k % 2 else App(Var("f"), encode_nat(k)), p) for k, p in _mk(pairs).items()])
    v, t = value_decomposition(d)
    assert not (v.support & t.support)
    assert add(v, t) == d
