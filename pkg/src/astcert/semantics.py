"""Call-by-value small-step semantics on term distributions, plus sampling."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Union

import numpy as np

from . import syntax as S
from .distributions import Distribution, collapse


class StuckTerm(Exception):
    def __init__(self, term, reason: str):
        super().__init__(f"stuck on {S.pretty(term)}: {reason}")
        self.term = term
        self.reason = reason


def _is_constructor(v) -> bool:
    return isinstance(v, (S.Zero, S.Succ))


def _step_redex(t) -> Distribution:
    if isinstance(t, S.App):
        f, a = t.fn, t.arg
        if isinstance(f, S.Lam):
            return Distribution.dirac(S.as_term(S.subst_value(f.body, f.binder, a)))
        if isinstance(f, S.LetRec):
            if not _is_constructor(a):
                raise StuckTerm(t, "recursive function applied to a non-constructor value")
            unfolded = S.subst_value(f.body, f.name, f)
            return Distribution.dirac(S.App(unfolded, a))
        raise StuckTerm(t, "application of a non-function value")
    if isinstance(t, S.Choice):
        return Distribution([(t.left, t.prob), (t.right, 1 - t.prob)])
    if isinstance(t, S.Case):
        v = t.scrutinee
        if isinstance(v, S.Succ):
            return Distribution.dirac(S.App(t.succ, v.arg))
        if isinstance(v, S.Zero):
            return Distribution.dirac(S.Val(t.zero))
        raise StuckTerm(t, "case on a non-numeral value")
    if isinstance(t, S.Let):
        # bound part is a value here (see step_term)
        return Distribution.dirac(S.as_term(S.subst_value(t.body, t.binder, t.bound.value)))
    raise StuckTerm(t, "no reduction rule applies")


@lru_cache(maxsize=1 << 16)
def step_term(t) -> Distribution:
    """One reduction step of a closed non-value term."""
    if isinstance(t, S.Val):
        raise StuckTerm(t, "values do not reduce")
    if isinstance(t, S.Let) and not isinstance(t.bound, S.Val):
        inner = step_term(t.bound)
        return collapse((S.Let(t.binder, m, t.body), p) for m, p in inner.items())
    return _step_redex(t)


def step_dist(d: Distribution) -> Distribution:
    """Step every non-value in the support once; keep the values."""
    pairs = []
    for t, p in d.items():
        if isinstance(t, S.Val):
            pairs.append((t, p))
        else:
            pairs.extend((u, p * q) for u, q in step_term(t).items())
    return collapse(pairs)


@dataclass(frozen=True)
class EvalReport:
    steps: int
    value_mass: Distribution  # over values
    residual_mass: Fraction
    termination_lower_bound: Fraction
    pending: Distribution  # non-value part after the last step

    def numeral_masses(self) -> dict:
        out = {}
        for v, p in self.value_mass.items():
            n = S.decode_nat(v)
            out[n if n is not None else S.pretty(v)] = p
        return out


def eval_n(t, n: int) -> EvalReport:
    """Apply n reduction steps to the Dirac distribution on t."""
    if n < 0:
        raise ValueError("negative step count")
    t = S.as_term(t)
    values: dict = {}
    pending = {t: Fraction(1)}
    if isinstance(t, S.Val):
        values, pending = {t.value: Fraction(1)}, {}
    for _ in range(n):
        if not pending:
            break
        nxt: dict = {}
        for u, p in pending.items():
            for v, q in step_term(u).items():
                w = p * q
                if isinstance(v, S.Val):
                    values[v.value] = values.get(v.value, Fraction(0)) + w
                else:
                    nxt[v] = nxt.get(v, Fraction(0)) + w
        pending = nxt
    vm = Distribution(values)
    rest = Distribution(pending)
    return EvalReport(n, vm, rest.sum(), vm.sum(), rest)


def termination_curve(t, n: int) -> list:
    """[sum of value mass after k steps for k = 0..n]."""
    t = S.as_term(t)
    out = []
    done = Fraction(1) if isinstance(t, S.Val) else Fraction(0)
    pending = {} if isinstance(t, S.Val) else {t: Fraction(1)}
    out.append(done)
    for _ in range(n):
        nxt: dict = {}
        for u, p in pending.items():
            for v, q in step_term(u).items():
                if isinstance(v, S.Val):
                    done += p * q
                else:
                    nxt[v] = nxt.get(v, Fraction(0)) + p * q
        pending = nxt
        out.append(done)
    return out


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------


class Timeout:
    def __repr__(self):
        return "Timeout"

    def __eq__(self, other):
        return isinstance(other, Timeout)

    def __hash__(self):
        return hash("Timeout")


TIMEOUT = Timeout()
_TWO64 = 1 << 64


def _draw(rng) -> Fraction:
    return Fraction(int(rng.bit_generator.random_raw()), _TWO64)


def sample(t, seed: int, max_steps: int, trial: int = 0) -> Union[S.Value, Timeout]:
    """Run one execution, resolving each choice with a 64-bit draw.

    The generator is seeded from (seed, trial), so trials are independent
    and reproducible.  A choice ``M (+ p) N`` picks M when draw/2^64 < p.
    """
    rng = np.random.default_rng([seed, trial])
    return _run(S.as_term(t), rng, max_steps)


def _run(t, rng, max_steps):
    for _ in range(max_steps):
        if isinstance(t, S.Val):
            return t.value
        d = step_term(t)
        if len(d) == 1:
            t = next(iter(d))
            continue
        u = _draw(rng)
        acc = Fraction(0)
        chosen = None
        for term, p in d.items():
            acc += p
            if u < acc:
                chosen = term
                break
        # mass of a proper step is 1, so the loop always chooses
        t = chosen if chosen is not None else term
    return t.value if isinstance(t, S.Val) else TIMEOUT


@dataclass
class SampleReport:
    trials: int
    seed: int
    max_steps: int
    counts: Counter
    timeouts: int

    @property
    def terminated(self) -> int:
        return self.trials - self.timeouts

    def frequency(self, v) -> float:
        return self.counts.get(v, 0) / self.trials


def sample_many(t, trials: int, seed: int, max_steps: int) -> SampleReport:
    counts: Counter = Counter()
    timeouts = 0
    t = S.as_term(t)
    for k in range(trials):
        out = _run(t, np.random.default_rng([seed, k]), max_steps)
        if isinstance(out, Timeout):
            timeouts += 1
        else:
            counts[out] += 1
    return SampleReport(trials, seed, max_steps, counts, timeouts)
