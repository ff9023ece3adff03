"""Finite-support subdistributions with exact rational weights."""
from __future__ import annotations

from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Mapping, Tuple


class DistributionOverflow(ValueError):
    """Raised when an operation would produce total mass above 1."""


def _frac(p) -> Fraction:
    if isinstance(p, float):
        raise TypeError("floating-point weights are not allowed; use Fraction")
    return Fraction(p)


class Distribution(Mapping):
    """Immutable map element -> positive Fraction with total mass <= 1.

    Zero weights are dropped, so equality of distributions is equality of
    the underlying maps.
    """

    __slots__ = ("_items", "_hash", "_total")

    def __init__(self, items=None):
        acc: dict = {}
        if items is not None:
            pairs = items.items() if isinstance(items, Mapping) else items
            for k, p in pairs:
                p = _frac(p)
                if p < 0:
                    raise ValueError(f"negative weight {p}")
                if p:
                    acc[k] = acc.get(k, Fraction(0)) + p
        total = sum(acc.values(), Fraction(0))
        if total > 1:
            raise DistributionOverflow(f"total mass {total} exceeds 1")
        self._items = acc
        self._total = total
        self._hash = None

    @classmethod
    def dirac(cls, x) -> "Distribution":
        return cls({x: Fraction(1)})

    # Mapping protocol
    def __getitem__(self, k) -> Fraction:
        return self._items[k]

    def get(self, k, default=Fraction(0)):
        return self._items.get(k, default)

    def __iter__(self) -> Iterator:
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __eq__(self, other):
        if isinstance(other, Distribution):
            return self._items == other._items
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._items.items()))
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{k!r}: {p}" for k, p in self._items.items())
        return f"{type(self).__name__}({{{inner}}})"

    def __str__(self):
        return format_distribution(self)

    # arithmetic
    def sum(self) -> Fraction:
        return self._total

    @property
    def support(self) -> frozenset:
        return frozenset(self._items)

    def scale(self, a) -> "Distribution":
        return scale(a, self)

    def __add__(self, other):
        return add(self, other)

    def __le__(self, other):
        return leq(self, other)

    def map(self, f: Callable) -> "Distribution":
        """Push forward along ``f``, merging entries with equal images."""
        return collapse((f(k), p) for k, p in self._items.items())

    def is_dirac(self) -> bool:
        return len(self._items) == 1 and self._total == 1

    def sorted_items(self, key=str) -> list:
        return sorted(self._items.items(), key=lambda kv: key(kv[0]))


def sum_of(d: Distribution) -> Fraction:
    return d.sum()


def scale(a, d: Distribution) -> Distribution:
    a = _frac(a)
    if not 0 <= a <= 1:
        raise ValueError(f"scale factor {a} outside [0,1]")
    return type(d)._raw({k: a * p for k, p in d.items()}) if a else Distribution()


def add(d: Distribution, e: Distribution) -> Distribution:
    if d.sum() + e.sum() > 1:
        raise DistributionOverflow(f"sum {d.sum()} + {e.sum()} exceeds 1")
    return collapse(list(d.items()) + list(e.items()))


def leq(d: Distribution, e: Distribution) -> bool:
    return all(p <= e.get(k, Fraction(0)) for k, p in d.items())


def collapse(pairs: Iterable[Tuple[Hashable, Fraction]]) -> Distribution:
    """Group a pseudo-representation (a multiset of weighted elements)."""
    return Distribution(list(pairs))


def mix(parts: Iterable[Tuple[Fraction, Distribution]]) -> Distribution:
    """``sum_j p_j * D_j``."""
    out = []
    for p, d in parts:
        p = _frac(p)
        out.extend((k, p * q) for k, q in d.items())
    return collapse(out)


def value_decomposition(d: Distribution, is_value: Callable = None):
    """Split into (values part, non-values part)."""
    if is_value is None:
        from .syntax import Val

        def is_value(t):
            return isinstance(t, Val)

    vals = {k: p for k, p in d.items() if is_value(k)}
    rest = {k: p for k, p in d.items() if not is_value(k)}
    return Distribution(vals), Distribution(rest)


def fmt_rational(p) -> str:
    p = Fraction(p)
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def format_distribution(d: Distribution, show: Callable = str) -> str:
    if not len(d):
        return "{}"
    inner = ", ".join(f"{show(k)} ↦ {fmt_rational(p)}" for k, p in d.sorted_items(show))
    return "{ " + inner + " }"


def _raw(cls, items: dict) -> Distribution:
    obj = Distribution.__new__(Distribution)
    obj._items = {k: p for k, p in items.items() if p}
    obj._total = sum(obj._items.values(), Fraction(0))
    obj._hash = None
    return obj


Distribution._raw = classmethod(_raw)
