from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from astcert.sized import (
    INF, ArrowS, DistType, NatS, Polarity, Size, UndefinedContextSum,
    is_negative, is_positive, positivity, prob_sum_ctx, prob_sum_dist, size_leq, size_subst,
    size_vars, subtype, subtype_dist, subtype_witness, underlying, weighted_sum_ctx,
)
from astcert.syntax import parse_dist_type, parse_type
from generators import (
    _size_above, probs, rand_dist_like, rand_like, rand_size, rand_super, rand_super_dist, rand_type, randoms, sized_types, sizes,
)

i, j = Size("i"), Size("j")
Nat = NatS


def d(*pairs):
    return DistType(list(pairs))


def test_size_leq_examples():
    assert size_leq(i, i.succ())
    assert size_leq(i.succ(3), INF)
    assert not size_leq(i.succ(), j.succ())
    assert not size_leq(INF, i)
    assert not size_leq(i.succ(), i)


def test_size_leq_exhaustive_offsets():
    for a in range(4):
        for b in range(4):
            assert size_leq(Size("i", a), Size("i", b)) == (a <= b)
            assert not size_leq(Size("i", a), Size("j", b))


def test_size_subst_examples():
    assert size_subst(i.succ(), "i", j.succ()) == j.succ(2)
    assert size_subst(Nat(i.succ()), "j", INF) == Nat(i.succ())
    mu = d((ArrowS(Nat(i), DistType.dirac(Nat())), F(1, 2)))
    assert size_subst(mu, "i", i.succ()) == d((ArrowS(Nat(i.succ()), DistType.dirac(Nat())), F(1, 2)))
    assert size_subst(Nat(i.succ(2)), "i", INF) == Nat(INF)


def test_positivity_examples():
    assert positivity("i", Nat(i.succ())) is Polarity.POSITIVE
    assert positivity("i", ArrowS(Nat(i.succ()), DistType.dirac(Nat()))) is Polarity.NEGATIVE
    assert positivity("i", Nat(j)) is Polarity.BOTH
    t = ArrowS(Nat(i), DistType.dirac(Nat(i)))
    assert positivity("i", t) is Polarity.NEITHER


def test_subtype_examples():
    assert subtype(Nat(i.succ()), Nat())
    a = ArrowS(Nat(), DistType.dirac(Nat(i.succ())))
    b = ArrowS(Nat(i), DistType.dirac(Nat(i.succ())))
    assert subtype(a, b) and not subtype(b, a)
    assert subtype_dist(d((Nat(i), F(1, 2)), (Nat(i.succ()), F(1, 2))), DistType.dirac(Nat(i.succ())))


def test_subtype_dist_capacity():
    m = d((Nat(i), F(1, 2)), (Nat(j), F(1, 2)))
    n = d((Nat(i.succ()), F(1, 2)), (Nat(), F(1, 4)))
    assert not subtype_dist(m, n)
    assert subtype_dist(m, d((Nat(i.succ()), F(1, 2)), (Nat(), F(1, 2))))
    w = subtype_witness(m, d((Nat(i.succ()), F(1, 2)), (Nat(), F(1, 2))))
    assert w == {(Nat(i), Nat(i.succ())): F(1, 2), (Nat(j), Nat()): F(1, 2)}


def test_subtype_dist_needs_backtracking():
    # greedy i -> inf would starve j
    m = d((Nat(i), F(1, 2)), (Nat(j), F(1, 2)))
    n = d((Nat(), F(1, 2)), (Nat(i.succ()), F(1, 2)))
    assert subtype_dist(m, n)


def test_subtype_dist_splits_mass():
    # a single entry may spread over several targets
    m = DistType.dirac(Nat(i))
    n = d((Nat(i), F(1, 2)), (Nat(), F(1, 2)))
    assert subtype_dist(m, n)
    assert subtype_witness(m, n) == {(Nat(i), Nat(i)): F(1, 2), (Nat(i), Nat()): F(1, 2)}
    assert not subtype_dist(m, d((Nat(i), F(1, 2)), (Nat(j), F(1, 2))))


def test_subtype_dist_reroutes():
    # first source grabs the shared target; the second forces a reroute
    m = d((Nat(j), F(1, 2)), (Nat(i), F(1, 2)))
    n = d((Nat(), F(1, 2)), (Nat(i.succ()), F(1, 2)))
    assert subtype_dist(m, n)
    big = DistType([(Nat(Size("i", k)), F(1, 13)) for k in range(13)])
    assert subtype_dist(big, big)


def test_subst_merge_example():
    a = ArrowS(Nat(), d((Nat(), F(1, 4)), (Nat(i), F(1, 2)), (Nat(j), F(1, 4))))
    b = ArrowS(Nat(), d((Nat(), F(1, 2)), (Nat(i), F(1, 2))))
    assert subtype(a, b)
    assert subtype(size_subst(a, "i", j), size_subst(b, "i", j))


def test_prob_sum_examples():
    s = DistType.dirac(Nat(i.succ()))
    assert prob_sum_dist(s, F(1, 2), s) == s
    t = DistType.dirac(Nat(i.succ(2)))
    assert prob_sum_dist(s, F(1, 2), t) == d((Nat(i.succ()), F(1, 2)), (Nat(i.succ(2)), F(1, 2)))


def test_context_sums():
    mu = DistType.dirac(ArrowS(Nat(i), DistType.dirac(Nat())))
    assert prob_sum_ctx(("x", mu), F(1, 3), None) == ("x", mu.scaled(F(1, 3)))
    assert prob_sum_ctx(None, F(1, 3), None) is None
    with pytest.raises(UndefinedContextSum):
        weighted_sum_ctx([("x", mu), ("y", mu)], [F(1, 2), F(1, 2)])
    with pytest.raises(UndefinedContextSum):
        prob_sum_ctx(("x", mu), F(1, 2), ("y", mu))
    assert weighted_sum_ctx([None, None], [F(1, 2), F(1, 2)]) is None
    x = weighted_sum_ctx([("x", mu), ("x", mu)], [F(1, 4), F(1, 2)])
    assert x == ("x", mu.scaled(F(3, 4)))


def test_dist_type_invariants():
    with pytest.raises(ValueError):
        DistType([])
    with pytest.raises(ValueError):
        d((Nat(), F(1, 2)), (ArrowS(Nat(), DistType.dirac(Nat())), F(1, 2)))


def test_type_printing_round_trip():
    for src in ["Nat", "Nat[i+1]", "Nat[i] -> Nat", "(Nat[i] -> Nat) -> {Nat ^ 1/3, Nat[j] ^ 1/2}"]:
        assert str(parse_type(src)) == src
    mu = parse_dist_type("{Nat[i] -> Nat ^ 2/3, Nat[i+2] -> Nat ^ 1/3}")
    assert mu == d((ArrowS(Nat(i), DistType.dirac(Nat())), F(2, 3)), (ArrowS(Nat(i.succ(2)), DistType.dirac(Nat())), F(1, 3)))


# ---- property suites -------------------------------------------------------

P = settings(max_examples=1000)


@P
@given(sizes)
def test_leq_reflexive(s):
    assert size_leq(s, s)


@P
@given(sizes, sizes, sizes)
def test_leq_transitive(a, b, c):
    if size_leq(a, b) and size_leq(b, c):
        assert size_leq(a, c)


@P
@given(sized_types())
def test_subtype_reflexive(t):
    assert subtype(t, t)
    assert subtype_dist(DistType.dirac(t), DistType.dirac(t))


@P
@given(randoms)
def test_subtype_transitive(r):
    a = rand_type(r)
    b, c = rand_like(r, a), rand_like(r, a)
    if subtype(a, b) and subtype(b, c):
        assert subtype(a, c)
    # chains built to be increasing must be recognised end to end
    b = rand_super(r, a)
    c = rand_super(r, b)
    assert subtype(a, b) and subtype(b, c) and subtype(a, c)


@P
@given(randoms)
def test_subtype_dist_transitive(r):
    m = rand_dist_like(r, rand_type(r, 1))
    n = rand_super_dist(r, m)
    o = rand_super_dist(r, n)
    assert subtype_dist(m, n) and subtype_dist(n, o) and subtype_dist(m, o)
    n2 = rand_dist_like(r, rand_like(r, next(iter(m))))
    if subtype_dist(m, n2) and subtype_dist(n2, o):
        assert subtype_dist(m, o)


@P
@given(randoms, st.sampled_from(["i", "j"]), sizes)
def test_subst_monotone(r, var, s):
    a = rand_type(r)
    b = rand_super(r, a)
    assert subtype(size_subst(a, var, s), size_subst(b, var, s))


@P
@given(randoms)
def test_positivity_subtyping_link(rnd):
    t = rand_type(rnd)
    s = rand_size(rnd)
    r = _size_above(rnd, s)
    if is_positive("i", t):
        assert subtype(size_subst(t, "i", s), size_subst(t, "i", r))
    if is_negative("i", t):
        assert subtype(size_subst(t, "i", r), size_subst(t, "i", s))


@P
@given(sized_types())
def test_absent_variable_is_both(t):
    if "i" not in size_vars(t):
        assert positivity("i", t) is Polarity.BOTH


@P
@given(randoms, st.sampled_from(["i", "j"]), sizes, probs)
def test_subst_commutes_with_prob_sum(rnd, var, r, p):
    m = rand_dist_like(rnd, rand_type(rnd, 1))
    n = rand_dist_like(rnd, rand_like(rnd, next(iter(m))))
    lhs = size_subst(prob_sum_dist(m, p, n), var, r)
    rhs = prob_sum_dist(size_subst(m, var, r), p, size_subst(n, var, r))
    assert lhs == rhs and underlying(lhs) == underlying(m)
