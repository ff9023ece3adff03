"""Sizes, sized types, distribution types and the context algebra."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Tuple, Union

from .distributions import Distribution, fmt_rational
from .simple_types import ArrowT, NatT, SimpleType


class UnderlyingMismatch(ValueError):
    pass


class UndefinedContextSum(ValueError):
    pass




# ---------------------------------------------------------------------------
# Sizes
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Size:
    """``var`` with ``offset`` successors, or infinity when ``var`` is None."""

    var: Optional[str]
    offset: int = 0

    def __post_init__(self):
        if self.var is None and self.offset:
            object.__setattr__(self, "offset", 0)
        if self.offset < 0:
            raise ValueError("negative size offset")

    @property
    def is_inf(self) -> bool:
        return self.var is None

    def succ(self, k: int = 1) -> "Size":
        return self if self.var is None else Size(self.var, self.offset + k)

    @property
    def spine(self) -> Optional[str]:
        return self.var

    def __str__(self):
        if self.var is None:
            return "inf"
        return self.var if not self.offset else f"{self.var}+{self.offset}"

    def __repr__(self):
        return f"Size({self})"


INF = Size(None)


def size_leq(s: Size, r: Size) -> bool:
    if r.is_inf:
        return True
    return s.var == r.var and s.offset <= r.offset


# ---------------------------------------------------------------------------
# Sized and distribution types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NatS:
    size: Size = INF

    def __str__(self):
        return "Nat" if self.size.is_inf else f"Nat[{self.size}]"


@dataclass(frozen=True)
class ArrowS:
    arg: "SizedType"
    res: "DistType"

    def __str__(self):
        a = f"({self.arg})" if isinstance(self.arg, ArrowS) else str(self.arg)
        return f"{a} -> {self.res}"


SizedType = Union[NatS, ArrowS]


def _type_key(t) -> str:
    return str(t)


class DistType(Distribution):
    """Non-empty distribution over sized types sharing one underlying type."""

    __slots__ = ()

    def __init__(self, items=None):
        super().__init__(items)
        if not len(self):
            raise ValueError("distribution type must be non-empty")
        kinds = {underlying(t) for t in self}
        if len(kinds) != 1:
            raise UnderlyingMismatch("entries of a distribution type must share an underlying type")

    @classmethod
    def dirac(cls, t) -> "DistType":
        return cls({t: Fraction(1)})

    @property
    def entries(self) -> list:
        return self.sorted_items(_type_key)

    def scaled(self, a) -> "DistType":
        return DistType({t: Fraction(a) * p for t, p in self.items()})

    def only(self):
        """The single type of a Dirac distribution type."""
        if not self.is_dirac():
            raise ValueError(f"{self} is not Dirac")
        return next(iter(self))

    def __str__(self):
        if self.is_dirac():
            return str(next(iter(self)))
        inner = ", ".join(f"{t} ^ {fmt_rational(p)}" for t, p in self.entries)
        return "{" + inner + "}"

    def __repr__(self):
        return f"DistType({self})"

    def __eq__(self, other):
        if isinstance(other, Distribution):
            return dict(self.items()) == dict(other.items())
        return NotImplemented

    __hash__ = Distribution.__hash__


def dirac(t) -> DistType:
    return DistType.dirac(t)


def underlying(t) -> SimpleType:
    if isinstance(t, NatS):
        return NatT()
    if isinstance(t, ArrowS):
        return ArrowT(underlying(t.arg), underlying(t.res))
    if isinstance(t, Distribution):
        return underlying(next(iter(t)))
    raise TypeError(f"not a sized type: {t!r}")


def erase_context(gamma: dict) -> dict:
    return {x: underlying(t) for x, t in gamma.items()}


def size_vars(t) -> frozenset:
    if isinstance(t, Size):
        return frozenset() if t.is_inf else frozenset({t.var})
    if isinstance(t, NatS):
        return size_vars(t.size)
    if isinstance(t, ArrowS):
        return size_vars(t.arg) | size_vars(t.res)
    if isinstance(t, Distribution):
        return frozenset().union(*(size_vars(s) for s in t))
    raise TypeError(t)


def size_subst(t, i: str, r: Size):
    """Substitute size ``r`` for the variable ``i``."""
    if isinstance(t, Size):
        if t.var != i:
            return t
        return INF if r.is_inf else Size(r.var, r.offset + t.offset)
    if isinstance(t, NatS):
        return NatS(size_subst(t.size, i, r))
    if isinstance(t, ArrowS):
        return ArrowS(size_subst(t.arg, i, r), size_subst(t.res, i, r))
    if isinstance(t, DistType):
        return DistType([(size_subst(s, i, r), p) for s, p in t.items()])
    raise TypeError(t)


# ---------------------------------------------------------------------------
# Positivity
# ---------------------------------------------------------------------------


class Polarity(enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    BOTH = "both"
    NEITHER = "neither"

    @property
    def positive(self) -> bool:
        return self in (Polarity.POSITIVE, Polarity.BOTH)

    @property
    def negative(self) -> bool:
        return self in (Polarity.NEGATIVE, Polarity.BOTH)


def _pos(i, t) -> bool:
    if isinstance(t, NatS):
        return True
    if isinstance(t, ArrowS):
        return _neg(i, t.arg) and _pos(i, t.res)
    return all(_pos(i, s) for s in t)


def _neg(i, t) -> bool:
    if isinstance(t, NatS):
        return t.size.var != i
    if isinstance(t, ArrowS):
        return _pos(i, t.arg) and _neg(i, t.res)
    return all(_neg(i, s) for s in t)


def positivity(i: str, t) -> Polarity:
    p, n = _pos(i, t), _neg(i, t)
    if p and n:
        return Polarity.BOTH
    if p:
        return Polarity.POSITIVE
    if n:
        return Polarity.NEGATIVE
    return Polarity.NEITHER


def is_positive(i: str, t) -> bool:
    return _pos(i, t)


def is_negative(i: str, t) -> bool:
    return _neg(i, t)


# ---------------------------------------------------------------------------
# Subtyping
# ---------------------------------------------------------------------------


@lru_cache(maxsize=65536)
def subtype(a, b) -> bool:
    if isinstance(a, NatS) and isinstance(b, NatS):
        return size_leq(a.size, b.size)
    if isinstance(a, ArrowS) and isinstance(b, ArrowS):
        return subtype(b.arg, a.arg) and subtype_dist(a.res, b.res)
    return False


def _transport(m: DistType, n: DistType) -> Optional[dict]:
    """Exact max-flow from the entries of m (supply p_i) to the entries of n
    (capacity q_j) along edges sigma_i below tau_j.  Returns the flow
    {(sigma, tau): mass} when all of m's mass fits, else None."""
    src, dst = m.entries, n.entries
    edges = [[j for j, (t, _) in enumerate(dst) if subtype(s, t)] for s, _ in src]
    flow: dict = {}
    cap = [q for _, q in dst]
    for k, (s, supply) in enumerate(src):
        left = supply
        while left:
            # BFS for an augmenting path src k -> ... -> some dst with spare capacity
            prev = {("s", k): None}
            queue = [("s", k)]
            end = None
            while queue and end is None:
                node = queue.pop(0)
                if node[0] == "s":
                    for j in edges[node[1]]:
                        if ("t", j) not in prev:
                            prev[("t", j)] = node
                            if cap[j] > 0:
                                end = ("t", j)
                                break
                            queue.append(("t", j))
                else:
                    j = node[1]
                    for (a, b), f in flow.items():
                        if b == j and f > 0 and ("s", a) not in prev:
                            prev[("s", a)] = node
                            queue.append(("s", a))
            if end is None:
                return None
            path = []
            node = end
            while prev[node] is not None:
                path.append((prev[node], node))
                node = prev[node]
            amount = min([left, cap[end[1]]] + [flow[(v[1], u[1])] for u, v in path if u[0] == "t"])
            cap[end[1]] -= amount
            left -= amount
            for u, v in path:
                if u[0] == "s":
                    flow[(u[1], v[1])] = flow.get((u[1], v[1]), Fraction(0)) + amount
                else:
                    flow[(v[1], u[1])] -= amount
    return {(src[a][0], dst[b][0]): f for (a, b), f in flow.items() if f}


def subtype_dist(m: DistType, n: DistType) -> bool:
    """Subtyping of distribution types, up to pseudo-representation.

    ``m`` is below ``n`` when m's mass can be routed to entries of n, each
    sigma_i only to tau_j with sigma_i below tau_j, without exceeding the
    weight of any tau_j.  Routing a whole entry to a single target is the
    special case where m is written with one copy per entry; allowing the
    mass to split is what keeps subtyping stable under size substitution,
    which may merge distinct entries.
    """
    if underlying(m) != underlying(n):
        return False
    if m.sum() > n.sum():
        return False
    return _transport(m, n) is not None


def subtype_witness(m: DistType, n: DistType) -> Optional[dict]:
    """The transport plan {(sigma, tau): mass} behind subtype_dist, or None."""
    if underlying(m) != underlying(n):
        return None
    return _transport(m, n)


# ---------------------------------------------------------------------------
# Sums of types and contexts
# ---------------------------------------------------------------------------


def prob_sum_dist(m: DistType, p, n: DistType) -> DistType:
    p = Fraction(p)
    if underlying(m) != underlying(n):
        raise UnderlyingMismatch(f"cannot mix {m} and {n}: underlying types differ")
    return DistType([(t, p * q) for t, q in m.items()] + [(t, (1 - p) * q) for t, q in n.items()])


def weighted_sum_types(parts) -> DistType:
    """``sum_i p_i * mu_i`` for a list of (p_i, mu_i)."""
    parts = list(parts)
    kinds = {underlying(mu) for _, mu in parts}
    if len(kinds) > 1:
        raise UnderlyingMismatch("weighted sum over distribution types of different underlying types")
    return DistType([(t, Fraction(p) * q) for p, mu in parts for t, q in mu.items()])


Theta = Optional[Tuple[str, DistType]]


def theta_str(th: Theta) -> str:
    return "∅" if th is None else f"{th[0]} : {th[1]}"


def prob_sum_ctx(t: Theta, p, u: Theta) -> Theta:
    p = Fraction(p)
    if t is None and u is None:
        return None
    if u is None:
        return (t[0], t[1].scaled(p))
    if t is None:
        return (u[0], u[1].scaled(1 - p))
    if t[0] != u[0]:
        raise UndefinedContextSum(f"distinguished variables differ: {t[0]} and {u[0]}")
    if underlying(t[1]) != underlying(u[1]):
        raise UndefinedContextSum(f"underlying types of {t[0]} differ")
    return (t[0], prob_sum_dist(t[1], p, u[1]))


def weighted_sum_ctx(ts, ps) -> Theta:
    ts, ps = list(ts), [Fraction(p) for p in ps]
    if not ts or len(ts) != len(ps):
        raise UndefinedContextSum("weighted sum needs a non-empty family with one weight per context")
    if sum(ps) > 1:
        raise UndefinedContextSum(f"weights sum to {sum(ps)} > 1")
    if all(t is None for t in ts):
        return None
    if any(t is None for t in ts):
        raise UndefinedContextSum("some contexts are empty and others are not")
    names = {t[0] for t in ts}
    if len(names) != 1:
        raise UndefinedContextSum(f"no common distinguished variable among {sorted(names)}")
    if len({underlying(t[1]) for t in ts}) != 1:
        raise UndefinedContextSum("underlying types differ across the family")
    x = names.pop()
    return (x, DistType([(s, p * q) for p, t in zip(ps, ts) for s, q in t[1].items()]))
