"""Sized walks: one-counter Markov chains on the naturals.

From state ``s + 1`` the walk moves to ``s + k`` with probability ``p_k``
and with the remaining probability ``kill = 1 - sum p_k`` jumps straight to
the absorbing state 0.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Dict, Optional

import numpy as np

from .distributions import fmt_rational
from .sized import ArrowS, Distribution, NatS


class NotAWalkType(ValueError):
    pass


@dataclass(frozen=True)
class SizedWalk:
    increments: Dict[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        inc = {}
        for k, p in dict(self.increments).items():
            k, p = int(k), Fraction(p)
            if k < 0:
                raise ValueError("increments are non-negative offsets")
            if p < 0:
                raise ValueError("negative probability")
            if p:
                inc[k] = inc.get(k, Fraction(0)) + p
        if sum(inc.values(), Fraction(0)) > 1:
            raise ValueError("increment probabilities sum above 1")
        object.__setattr__(self, "increments", dict(sorted(inc.items())))

    def __hash__(self):
        return hash(tuple(self.increments.items()))

    @property
    def kill(self) -> Fraction:
        return 1 - sum(self.increments.values(), Fraction(0))

    @property
    def drift(self) -> Fraction:
        """Expected change of the counter per non-killed step, ``sum p_k (k-1)``."""
        return sum((p * (k - 1) for k, p in self.increments.items()), Fraction(0))

    @property
    def max_increment(self) -> int:
        return max(self.increments, default=0)

    def __str__(self):
        inner = ", ".join(f"{k}:{fmt_rational(p)}" for k, p in self.increments.items())
        return f"walk{{{inner}}}"


_WALK_RE = re.compile(r"^\s*(?:walk)?\s*\{(?P<body>[^}]*)\}\s*$")


def parse_walk(text: str) -> SizedWalk:
    m = _WALK_RE.match(text)
    if not m:
        raise ValueError(f"not a walk literal: {text!r}")
    inc: Dict[int, Fraction] = {}
    body = m.group("body").strip()
    if body:
        for part in body.split(","):
            try:
                k, p = part.split(":")
                k_int, p_frac = int(k.strip()), Fraction(p.strip())
            except ValueError as e:
                raise ValueError(f"bad walk entry {part.strip()!r}") from e
            inc[k_int] = inc.get(k_int, Fraction(0)) + p_frac
    return SizedWalk(inc)


def from_distribution_type(mu) -> SizedWalk:
    """Read the walk off ``{(Nat^{i+k_j} -> nu_j)^{p_j}}``."""
    spine = None
    inc: Dict[int, Fraction] = {}
    for t, p in mu.items():
        if not isinstance(t, ArrowS) or not isinstance(t.arg, NatS):
            raise NotAWalkType(f"entry {t} is not a function on Nat")
        s = t.arg.size
        if s.is_inf:
            raise NotAWalkType(f"entry {t} has no spine variable")
        if spine is None:
            spine = s.var
        elif s.var != spine:
            raise NotAWalkType(f"spine variables differ: {spine} and {s.var}")
        inc[s.offset] = inc.get(s.offset, Fraction(0)) + p
    if spine is None:
        raise NotAWalkType("empty distribution type")
    return SizedWalk(inc)


def walk_spine(mu) -> Optional[str]:
    try:
        from_distribution_type(mu)
    except NotAWalkType:
        return None
    return next(iter(mu)).arg.size.var


# ---------------------------------------------------------------------------
# Decision procedure and oracle
# ---------------------------------------------------------------------------


def is_ast(w: SizedWalk) -> bool:
    """Decide whether the walk is absorbed at 0 with probability 1 from
    every start state.

    A positive kill probability absorbs geometrically fast.  Otherwise the
    walk moves down by at most one per step, so it is recurrent towards 0
    exactly when its drift is negative, or zero with positive variance.
    The only zero-drift walk without variance stays put forever.
    """
    if w.kill > 0:
        return True
    d = w.drift
    if d < 0:
        return True
    return d == 0 and w.increments.get(1, Fraction(0)) != 1


def _pgf(w: SizedWalk, x: Fraction) -> Fraction:
    return sum((p * x**k for k, p in w.increments.items()), Fraction(0))


def hitting_interval(w: SizedWalk, tol) -> tuple:
    """Rational interval [lo, hi] of width <= tol enclosing the probability
    of ever reaching 0 from state 1.

    Without kill, that probability is the least root in [0,1] of
    ``x = G(x)`` with ``G`` the increment generating function; ``G(x) > x``
    strictly below the least root and ``G(x) <= x`` between it and 1, so
    exact bisection on the sign of ``G(x) - x`` converges to it.
    """
    tol = Fraction(tol)
    if w.kill > 0:
        return Fraction(1), Fraction(1)
    lo, hi = Fraction(0), Fraction(1)
    if _pgf(w, Fraction(0)) == 0:
        return lo, lo
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if _pgf(w, mid) > mid:
            lo = mid
        else:
            hi = mid
    return lo, hi


def hitting_probability(w: SizedWalk, tol=Fraction(1, 10**9), m: int = 1) -> Fraction:
    """Approximation (lower end, within tol of the truth for m = 1) of the
    probability of reaching 0 from state m."""
    lo, _ = hitting_interval(w, tol)
    return lo**m


def least_root_poly(w: SizedWalk) -> float:
    """Float least root of G(x) = x via numpy, used only as a cross-check."""
    if w.kill > 0:
        return 1.0
    coeffs = np.zeros(w.max_increment + 2)
    for k, p in w.increments.items():
        coeffs[k] += float(p)
    coeffs[1] -= 1.0
    roots = np.roots(coeffs[::-1]) if np.any(coeffs[1:]) else np.array([])
    real = [r.real for r in roots if abs(r.imag) < 1e-9 and -1e-9 <= r.real <= 1 + 1e-9]
    return min(real + [1.0]) if real else 1.0


# ---------------------------------------------------------------------------
# Finite horizons
# ---------------------------------------------------------------------------


def _common_denominator(w: SizedWalk) -> int:
    dens = [p.denominator for p in w.increments.values()] + [w.kill.denominator]
    return reduce(lambda a, b: a * b // math.gcd(a, b), dens, 1)


def finite_horizon_curve(w: SizedWalk, n: int, m: int) -> list:
    """Exact ``[Pr_0^(m), ..., Pr_n^(m)]``.

    Forward dynamic programming on integer masses scaled by ``D^t``.  A state
    above the number of remaining steps cannot walk down to 0 in time, so
    such states are pooled and only their kill mass is tracked.
    """
    if m <= 0:
        return [Fraction(1)] * (n + 1)
    D = _common_denominator(w)
    weights = [(k, int(p * D)) for k, p in w.increments.items()]
    kw = int(w.kill * D)
    out = [Fraction(0)]
    # vec[s] = scaled mass at state s >= 1 (index 0 unused)
    vec = [0] * (n + 2)
    far = 0
    if m <= n:
        vec[m] = 1
    else:
        far = 1
    absorbed = 0
    scale = 1
    for t in range(1, n + 1):
        remaining = n - t
        new = [0] * (n + 2)
        absorbed *= D
        absorbed += kw * far
        far *= D - kw
        for s in range(1, min(len(vec), n + 2)):
            x = vec[s]
            if not x:
                continue
            absorbed += kw * x
            for k, pw in weights:
                dst = s - 1 + k
                if dst == 0:
                    absorbed += pw * x
                elif dst > remaining:
                    far += pw * x
                else:
                    new[dst] += pw * x
        vec = new
        scale *= D
        out.append(Fraction(absorbed, scale))
    return out


def finite_horizon(w: SizedWalk, n: int, m: int) -> Fraction:
    """Exact probability of reaching 0 from m within n steps."""
    if n < 0:
        raise ValueError("negative horizon")
    return finite_horizon_curve(w, n, m)[-1]


def finite_horizon_recurrence(w: SizedWalk, n: int, m: int) -> Fraction:
    """Direct memoised recurrence, kept as an independent reference."""
    memo: dict = {}
    kill = w.kill
    incs = list(w.increments.items())

    def pr(t, s):
        if s == 0:
            return Fraction(1)
        if t == 0 or s > t and kill == 0:
            return Fraction(0)
        key = (t, s)
        if key not in memo:
            memo[key] = sum((p * pr(t - 1, s - 1 + k) for k, p in incs), Fraction(0)) + kill
        return memo[key]

    return pr(n, m)


@dataclass
class HorizonBounds:
    """Rigorous float enclosures lo[t] <= Pr_t^(m) <= hi[t] for t <= n."""

    lo: np.ndarray
    hi: np.ndarray


_ULP = 2.0**-50


def horizon_bounds(w: SizedWalk, n: int, m: int, cutoff: float = 1e-40) -> HorizonBounds:
    """Float forward iteration with an a-priori rounding margin.

    Each step performs at most ``|J| + 4`` roundings on quantities bounded by
    the total mass 1, so ``t * (|J| + 4) * 2^-50`` dominates the accumulated
    floating-point error after ``t`` steps.  Mass that falls below ``cutoff``
    at the top of the active window is discarded and counted as lost; lost
    mass widens only the upper bound.
    """
    incs = [(k, float(p)) for k, p in w.increments.items()]
    kill = float(w.kill)
    per_step = (len(incs) + 4) * _ULP
    lo = np.empty(n + 1)
    hi = np.empty(n + 1)
    if m <= 0:
        lo[:] = 1.0
        hi[:] = 1.0
        return HorizonBounds(lo, hi)
    kmax = max((k for k, _ in incs), default=0)
    size = m + 64
    vec = np.zeros(size)
    vec[m] = 1.0
    top = m  # highest possibly non-zero index
    absorbed = 0.0
    lost = 0.0
    lo[0] = hi[0] = 0.0
    for t in range(1, n + 1):
        need = top + kmax + 2
        if need > size:
            size = max(need, 2 * size)
            grown = np.zeros(size)
            grown[: len(vec)] = vec
            vec = grown
        active = vec[1 : top + 1]
        new = np.zeros(size)
        absorbed += kill * float(active.sum())
        for k, p in incs:
            # state s moves to s - 1 + k
            new[k : top + k] += p * active
        absorbed += float(new[0])
        new[0] = 0.0
        top = top + kmax - 1 if kmax >= 1 else top - 1
        top = max(top, 0)
        while top > 0 and new[top] < cutoff:
            lost += float(new[top])
            new[top] = 0.0
            top -= 1
        vec = new
        margin = t * per_step
        lo[t] = max(0.0, absorbed - margin)
        hi[t] = min(1.0, absorbed + lost + margin)
    return HorizonBounds(lo, hi)


def first_horizon(w: SizedWalk, m: int, eps, n_max: int = 100_000, bounds: HorizonBounds = None) -> Optional[int]:
    """Least n <= n_max whose certified lower bound on Pr_n^(m) is >= 1 - eps.

    The comparison is done on exact rationals (the float lower bound is
    converted exactly).  Returns None if no such n is certified.
    """
    target = 1 - Fraction(eps)
    if bounds is None:
        bounds = horizon_bounds(w, n_max, m)
    lo = bounds.lo
    cand = np.nonzero(lo >= float(target) - 1e-12)[0]
    for n in cand:
        if Fraction(float(lo[n])) >= target:
            return int(n)
    return None
