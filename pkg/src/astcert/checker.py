"""Derivations for the monadic affine sized type system.

A :class:`Derivation` is an explicit proof tree; :func:`check_derivation`
validates it rule by rule.  :func:`elaborate` builds derivations from
annotated programs, reading the rules syntax-directedly and inserting
subtyping steps where a premise type has to be weakened.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from . import syntax as S
from .distributions import Distribution, collapse
from .semantics import eval_n, step_dist
from .simple_types import NAT, SimpleTypeError, check_simple
from .sized import (
    INF,
    ArrowS,
    DistType,
    NatS,
    Size,
    Theta,
    UndefinedContextSum,
    UnderlyingMismatch,
    dirac,
    is_positive,
    prob_sum_ctx,
    prob_sum_dist,
    size_leq,
    size_subst,
    size_vars,
    subtype_dist,
    theta_str,
    underlying,
    weighted_sum_ctx,
    weighted_sum_types,
)
from .walk import NotAWalkType, from_distribution_type, is_ast

RULES = ("Var", "Var'", "Succ", "Zero", "Lambda", "Sub", "App", "Choice", "Let", "Case", "LetRec")


class RuleViolation(Exception):
    def __init__(self, path: str, rule: str, condition: str):
        super().__init__(f"{rule} at {path}: {condition}")
        self.path = path
        self.rule = rule
        self.condition = condition

    def record(self) -> dict:
        return {"error": type(self).__name__, "path": self.path, "rule": self.rule, "condition": self.condition}


class WalkNotAST(RuleViolation):
    pass


class ElaborationFailure(Exception):
    def __init__(self, message: str, rule: str = "?", span=None):
        where = f" at {span[0]}:{span[1]}" if span else ""
        super().__init__(f"{rule}{where}: {message}")
        self.message = message
        self.rule = rule
        self.span = span

    def record(self) -> dict:
        return {
            "error": "ElaborationFailure",
            "rule": self.rule,
            "span": list(self.span) if self.span else None,
            "message": self.message,
        }


@dataclass
class Derivation:
    rule: str
    gamma: Dict[str, object]
    theta: Theta
    subject: object  # term or value; Val(V) is identified with V
    type: DistType
    premises: List["Derivation"] = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def __post_init__(self):
        self.subject = S.unwrap(self.subject)

    def judgement(self) -> str:
        g = ", ".join(f"{x} : {t}" for x, t in self.gamma.items()) or "∅"
        return f"{g} | {theta_str(self.theta)} ⊢ {S.pretty(self.subject)} : {self.type}"

    def size(self) -> int:
        return 1 + sum(p.size() for p in self.premises)

    def with_theta(self, theta: Theta) -> "Derivation":
        return Derivation(self.rule, dict(self.gamma), theta, self.subject, self.type, list(self.premises), dict(self.data))

    def pretty(self, indent: int = 0) -> str:
        lines = ["  " * indent + f"[{self.rule}] {self.judgement()}"]
        for p in self.premises:
            lines.append(p.pretty(indent + 1))
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------


def _is_hat(s: Size) -> bool:
    """Sizes of the shape ŝ: infinity or at least one successor."""
    return s.is_inf or s.offset >= 1


def _pred(s: Size) -> Size:
    return s if s.is_inf else Size(s.var, s.offset - 1)


def _nat_of(mu: DistType) -> Optional[Size]:
    if mu.is_dirac():
        t = mu.only()
        if isinstance(t, NatS):
            return t.size
    return None


def _arrow_of(mu: DistType) -> Optional[ArrowS]:
    if mu.is_dirac() and isinstance(mu.only(), ArrowS):
        return mu.only()
    return None


def _theta_var(th: Theta) -> set:
    return set() if th is None else {th[0]}


def _theta_eq(a: Theta, b: Theta) -> bool:
    if a is None or b is None:
        return a is None and b is None
    return a[0] == b[0] and a[1] == b[1]


def _letrec_fun_type(i: str, nu: DistType, calls) -> DistType:
    return DistType([(ArrowS(NatS(s), size_subst(nu, i, s)), Fraction(p)) for s, p in calls])


def check_derivation(d: Derivation, erase: bool = True) -> None:
    """Raise :class:`RuleViolation` unless ``d`` is a valid derivation.

    With ``erase`` the erasure of the root judgement is also type-checked
    in the affine simple type system.
    """
    _check(d, "root")
    if erase:
        env = {x: underlying(t) for x, t in d.gamma.items()}
        if d.theta is not None:
            env[d.theta[0]] = underlying(d.theta[1])
        try:
            ty = check_simple(env, d.subject)
        except SimpleTypeError as e:
            raise RuleViolation("root", d.rule, f"erasure is not simply typable: {e}") from e
        if ty != underlying(d.type):
            raise RuleViolation("root", d.rule, f"erasure has type {ty}, not {underlying(d.type)}")


def _check(d: Derivation, path: str) -> None:
    def fail(cond):
        raise RuleViolation(path, d.rule, cond)

    def need(ok, cond):
        if not ok:
            fail(cond)

    if d.rule not in RULES:
        fail(f"unknown rule {d.rule!r}")
    need(isinstance(d.type, DistType), "conclusion type must be a distribution type")
    need(not (_theta_var(d.theta) & set(d.gamma)), "Γ and Θ must have disjoint domains")
    t = d.subject
    if isinstance(t, S.Value):
        need(d.type.is_dirac(), f"value typed by non-Dirac {d.type}")
    else:
        need(d.type.sum() == 1, f"term typed by improper {d.type}")

    arity = {
        "Var": 0, "Var'": 0, "Zero": 0, "Succ": 1, "Lambda": 1, "Sub": 1,
        "App": 2, "Choice": 2, "Case": 3, "LetRec": 1,
    }
    if d.rule in arity:
        need(len(d.premises) == arity[d.rule], f"expected {arity[d.rule]} premise(s), got {len(d.premises)}")
    for k, p in enumerate(d.premises):
        need(isinstance(p, Derivation), "premise is not a derivation")

    rule = d.rule
    prem = d.premises

    if rule == "Var":
        need(isinstance(t, S.Var), "subject must be a variable")
        need(t.name in d.gamma, f"{t.name} not in Γ")
        need(d.type == dirac(d.gamma[t.name]), f"type of {t.name} in Γ is {d.gamma[t.name]}, not {d.type}")

    elif rule == "Var'":
        need(isinstance(t, S.Var), "subject must be a variable")
        need(d.theta is not None and d.theta[0] == t.name, f"Θ must be {t.name} : σ")
        need(d.theta[1].is_dirac(), "Θ must carry a Dirac type")
        need(d.type == d.theta[1], f"type {d.type} differs from Θ")

    elif rule == "Zero":
        need(isinstance(t, S.Zero), "subject must be 0")
        s = _nat_of(d.type)
        need(s is not None and _is_hat(s), f"0 must have a type Nat[ŝ], got {d.type}")

    elif rule == "Succ":
        need(isinstance(t, S.Succ), "subject must be S V")
        (p,) = prem
        _same_ctx(p, d, need)
        need(p.subject == t.arg, "premise subject must be the argument of S")
        s = _nat_of(p.type)
        need(s is not None, "premise must have type Nat[s]")
        need(d.type == dirac(NatS(s.succ())), f"conclusion must be Nat[{s.succ()}]")

    elif rule == "Lambda":
        need(isinstance(t, S.Lam), "subject must be an abstraction")
        (p,) = prem
        arr = _arrow_of(d.type)
        need(arr is not None, "type must be an arrow")
        need(p.subject == S.unwrap(t.body), "premise subject must be the body")
        need(_theta_eq(p.theta, d.theta), "Θ must be unchanged")
        need(t.binder not in d.gamma and not (t.binder in _theta_var(d.theta)), "binder already in context")
        need(p.gamma == {**d.gamma, t.binder: arr.arg}, f"premise Γ must extend Γ with {t.binder} : {arr.arg}")
        need(p.type == arr.res, "premise type must be the codomain")
        if t.annot is not None:
            need(underlying(t.annot) == underlying(arr.arg), "binder type contradicts the annotation")

    elif rule == "Sub":
        (p,) = prem
        _same_ctx(p, d, need)
        need(p.subject == t, "Sub keeps the subject")
        need(subtype_dist(p.type, d.type), f"{p.type} is not a subtype of {d.type}")

    elif rule == "App":
        need(isinstance(t, S.App), "subject must be an application")
        pv, pw = prem
        need(pv.subject == t.fn and pw.subject == t.arg, "premise subjects must be V and W")
        _split(d, [pv.gamma, pw.gamma], need)
        arr = _arrow_of(pv.type)
        need(arr is not None, "function premise must have an arrow type")
        need(pw.type == dirac(arr.arg), f"argument type {pw.type} must be {arr.arg}")
        need(pv.theta is None or pw.theta is None, "at most one premise may carry Θ")
        need(_theta_eq(d.theta, pv.theta if pv.theta is not None else pw.theta), "Θ must be Θ,Ψ")
        need(d.type == arr.res, "conclusion type must be the codomain")

    elif rule == "Choice":
        need(isinstance(t, S.Choice), "subject must be a choice")
        pm, pn = prem
        need(pm.subject == S.unwrap(t.left) and pn.subject == S.unwrap(t.right), "premise subjects must be the arms")
        need(pm.gamma == d.gamma and pn.gamma == d.gamma, "both arms use the same Γ")
        need(underlying(pm.type) == underlying(pn.type), "underlying(μ) = underlying(ν) fails")
        try:
            th = prob_sum_ctx(pm.theta, t.prob, pn.theta)
        except UndefinedContextSum as e:
            fail(f"Θ ⊕p Ψ undefined: {e}")
        need(_theta_eq(th, d.theta), f"Θ must be {theta_str(th)}")
        need(d.type == prob_sum_dist(pm.type, t.prob, pn.type), "type must be μ ⊕p ν")

    elif rule == "Let":
        need(isinstance(t, S.Let), "subject must be a let")
        need(len(prem) >= 2, "Let needs a premise for M and at least one for N")
        pm, fam = prem[0], prem[1:]
        need(pm.subject == S.unwrap(t.bound), "first premise subject must be the bound term")
        x = t.binder
        need(x not in d.gamma and x not in _theta_var(d.theta), "binder already in context")
        sigmas = []
        for q in fam:
            need(q.subject == S.unwrap(t.body), "family premise subject must be the body")
            need(x in q.gamma, f"family premise must type {x}")
            sigmas.append(q.gamma[x])
        need(len(set(sigmas)) == len(sigmas), "family is indexed by distinct types")
        need(set(sigmas) == set(pm.type), "family must range over the support of M's type")
        rest = [{k: v for k, v in q.gamma.items() if k != x} for q in fam]
        need(all(r == rest[0] for r in rest), "family premises must share Γ,Ξ")
        _split(d, [pm.gamma, rest[0]], need)
        ps = [pm.type[s] for s in sigmas]
        try:
            psi = weighted_sum_ctx([q.theta for q in fam], ps)
        except UndefinedContextSum as e:
            fail(f"weighted sum of contexts undefined: {e}")
        need(pm.theta is None or psi is None, "at most one of Θ and Σ p_i·Ψ_i may be non-empty")
        need(_theta_eq(d.theta, pm.theta if pm.theta is not None else psi), "Θ must be Θ,Σ p_i·Ψ_i")
        try:
            ty = weighted_sum_types(zip(ps, [q.type for q in fam]))
        except (UnderlyingMismatch, ValueError) as e:
            fail(str(e))
        need(d.type == ty, f"type must be Σ p_i·μ_i = {ty}")

    elif rule == "Case":
        need(isinstance(t, S.Case), "subject must be a case")
        pv, pw, pz = prem
        need(pv.subject == t.scrutinee and pw.subject == t.succ and pz.subject == t.zero, "premise subjects")
        need(pv.theta is None, "scrutinee premise must have empty Θ")
        need(not set(pv.gamma) & set(pw.gamma), "Γ and Δ must be disjoint")
        need(pw.gamma == pz.gamma, "branches share Δ")
        need(d.gamma == {**pv.gamma, **pw.gamma}, "conclusion Γ must be Γ,Δ")
        need(_theta_eq(pw.theta, d.theta) and _theta_eq(pz.theta, d.theta), "branches share Θ")
        s = _nat_of(pv.type)
        need(s is not None and _is_hat(s), "scrutinee must have type Nat[ŝ]")
        need(pw.type == dirac(ArrowS(NatS(_pred(s)), d.type)), f"successor branch must have type Nat[{_pred(s)}] -> {d.type}")
        need(pz.type == d.type, "zero branch must have the case type")

    elif rule == "LetRec":
        need(isinstance(t, S.LetRec), "subject must be a letrec")
        (p,) = prem
        try:
            i = d.data["size_var"]
            nu = d.data["nu"]
            calls = [(s, Fraction(q)) for s, q in d.data["calls"]]
            r = d.data["r"]
        except (KeyError, TypeError, ValueError):
            fail("rule data must give size_var, nu, calls and r")
        need(isinstance(nu, DistType) and isinstance(r, Size), "malformed rule data")
        if t.annot is not None:
            need(
                t.annot.var == i and t.annot.nu == nu
                and sorted(map(str, t.annot.calls)) == sorted(map(str, [(s, q) for s, q in calls])),
                "rule data must agree with the letrec annotation",
            )
        need(calls and all(not s.is_inf and s.var == i for s, _ in calls), f"every call size must have spine {i}")
        f = t.name
        need(f not in d.gamma and f not in _theta_var(d.theta), f"{f} must not occur in the conclusion contexts")
        need(p.subject == t.body, "premise subject must be the recursive body")
        need(all(x in d.gamma and d.gamma[x] == ty for x, ty in p.gamma.items()), "premise Γ must be part of the conclusion Γ")
        need(all(underlying(ty) == NAT for ty in p.gamma.values()), "underlying(Γ) = Nat fails")
        need(all(i not in size_vars(ty) for ty in p.gamma.values()), f"{i} must not occur in Γ")
        need(is_positive(i, nu), f"{i} must be positive in {nu}")
        try:
            mu_f = _letrec_fun_type(i, nu, calls)
        except (ValueError, UnderlyingMismatch) as e:
            fail(f"ill-formed recursive type: {e}")
        need(p.theta is not None and p.theta[0] == f and p.theta[1] == mu_f, f"premise Θ must be {f} : {mu_f}")
        need(p.type == dirac(ArrowS(NatS(Size(i, 1)), size_subst(nu, i, Size(i, 1)))), "premise type must be Nat[i+1] -> ν[i:=i+1]")
        need(d.type == dirac(ArrowS(NatS(r), size_subst(nu, i, r))), f"conclusion type must be Nat[{r}] -> ν[{i}:={r}]")
        try:
            w = from_distribution_type(mu_f)
        except NotAWalkType as e:
            fail(str(e))
        if not is_ast(w):
            raise WalkNotAST(path, rule, f"{w} (kill {w.kill}, drift {w.drift}) is not AST")

    for k, p in enumerate(prem):
        _check(p, f"{path}/{k}")


def _same_ctx(p: Derivation, d: Derivation, need) -> None:
    need(p.gamma == d.gamma, "premise Γ must equal the conclusion Γ")
    need(_theta_eq(p.theta, d.theta), "premise Θ must equal the conclusion Θ")


def _split(d: Derivation, parts: Sequence[dict], need) -> None:
    """Γ,Δ,Ξ with a shared Nat part Γ."""
    merged: dict = {}
    for part in parts:
        for x, ty in part.items():
            if x in merged:
                need(merged[x] == ty, f"{x} typed differently in the premises")
                need(underlying(ty) == NAT, f"higher-order variable {x} shared between premises")
            merged[x] = ty
    need(merged == d.gamma, "conclusion Γ must be the union of the premise contexts")


# ---------------------------------------------------------------------------
# Elaboration
# ---------------------------------------------------------------------------


@dataclass
class _Rec:
    name: str
    entries: list  # candidate sized types for the distinguished variable
    choice: dict  # path -> index into entries


class _Elab:
    MAX_COMBOS = 4096

    def fail(self, msg, rule="?", node=None):
        raise ElaborationFailure(msg, rule, getattr(node, "span", None))

    # -- helpers
    def coerce(self, d: Derivation, expected: Optional[DistType]) -> Derivation:
        if expected is None or d.type == expected:
            return d
        if not subtype_dist(d.type, expected):
            self.fail(f"{S.pretty(d.subject)} has type {d.type}, not a subtype of {expected}", "Sub", d.subject)
        return Derivation("Sub", dict(d.gamma), d.theta, d.subject, expected, [d])

    def weaken(self, d: Derivation, theta: Theta) -> Derivation:
        """Turn a derivation with empty Θ into one with Θ = theta."""
        if theta is None or _theta_eq(d.theta, theta):
            return d
        if d.theta is not None:
            self.fail(f"cannot reconcile Θ {theta_str(d.theta)} with {theta_str(theta)}", d.rule, d.subject)
        r = d.rule
        out = d.with_theta(theta)
        if r in ("Var", "Zero", "LetRec"):
            return out
        if r in ("Succ", "Lambda", "Sub"):
            out.premises = [self.weaken(d.premises[0], theta)]
        elif r in ("App", "Let"):
            out.premises = [self.weaken(d.premises[0], theta)] + list(d.premises[1:])
        elif r == "Choice":
            out.premises = [self.weaken(p, theta) for p in d.premises]
        elif r == "Case":
            out.premises = [d.premises[0]] + [self.weaken(p, theta) for p in d.premises[1:]]
        else:
            self.fail(f"cannot weaken a {r} node", r, d.subject)
        return out

    def split(self, gamma: dict, fv_left: frozenset, fv_right: frozenset, rule, node):
        left, right = {}, {}
        for x, ty in gamma.items():
            in_l, in_r = x in fv_left, x in fv_right
            if in_l and in_r:
                if underlying(ty) != NAT:
                    self.fail(f"affinity: higher-order variable {x} used on both sides", rule, node)
                left[x] = right[x] = ty
            elif in_r:
                right[x] = ty
            else:
                left[x] = ty
        return left, right

    # -- main entry
    def elab(self, t, gamma: dict, exp: Optional[DistType], rec: Optional[_Rec], path=(), arg_hint=None, r_hint=None) -> Derivation:
        t = S.unwrap(t)
        meth = getattr(self, "e_" + type(t).__name__)
        return meth(t, gamma, exp, rec, path, arg_hint, r_hint)

    def e_Var(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        if t.name in gamma:
            return self.coerce(Derivation("Var", dict(gamma), None, t, dirac(gamma[t.name])), exp)
        if rec is not None and t.name == rec.name:
            k = rec.choice.get(path)
            if k is None:
                self.fail(f"no call-site choice for {t.name}", "Var'", t)
            sigma = rec.entries[k]
            d = Derivation("Var'", dict(gamma), (t.name, dirac(sigma)), t, dirac(sigma))
            return self.coerce(d, exp)
        self.fail(f"unbound variable {t.name}", "Var", t)

    def e_Zero(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        s = None
        if exp is not None:
            s = _nat_of(exp)
            if s is None:
                self.fail(f"0 cannot have type {exp}", "Zero", t)
            if not _is_hat(s):
                d = Derivation("Zero", dict(gamma), None, t, dirac(NatS(INF)))
                return self.coerce(d, exp)
        return Derivation("Zero", dict(gamma), None, t, dirac(NatS(s if s is not None else INF)))

    def e_Succ(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        s = _nat_of(exp) if exp is not None else None
        sub_exp = dirac(NatS(_pred(s))) if s is not None and not s.is_inf and s.offset >= 1 else None
        p = self.elab(t.arg, gamma, sub_exp, rec, path + (0,))
        a = _nat_of(p.type)
        if a is None:
            self.fail("S applied to a non-Nat value", "Succ", t)
        d = Derivation("Succ", dict(gamma), p.theta, t, dirac(NatS(a.succ())), [p])
        return self.coerce(d, exp)

    def e_Lam(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        arr = _arrow_of(exp) if exp is not None else None
        if t.annot is not None:
            sigma = t.annot
        elif arr is not None:
            sigma = arr.arg
        elif arg_hint is not None:
            sigma = arg_hint
        else:
            sigma = NatS(INF)
        body_exp = arr.res if arr is not None else None
        g2 = {**gamma, t.binder: sigma}
        p = self.elab(t.body, g2, body_exp, rec, path + (0,))
        d = Derivation("Lambda", dict(gamma), p.theta, t, dirac(ArrowS(sigma, p.type)), [p])
        return self.coerce(d, exp)

    def e_LetRec(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        a = t.annot
        if a is None:
            self.fail(f"letrec {t.name} carries no size annotation", "LetRec", t)
        i, nu, calls = a.var, a.nu, list(a.calls)
        arr = _arrow_of(exp) if exp is not None else None
        if r_hint is not None:
            r = r_hint
        elif arr is not None and isinstance(arr.arg, NatS):
            r = arr.arg.size
        else:
            r = INF
        try:
            mu_f = _letrec_fun_type(i, nu, calls)
        except (ValueError, UnderlyingMismatch) as e:
            self.fail(f"ill-formed annotation: {e}", "LetRec", t)
        inner_gamma = {}
        for x in sorted(t.body.fv - {t.name}):
            if x not in gamma:
                self.fail(f"{x} is not a Nat variable of Γ", "LetRec", t)
            if underlying(gamma[x]) != NAT:
                self.fail(f"letrec body uses higher-order variable {x}", "LetRec", t)
            if i in size_vars(gamma[x]):
                self.fail(f"size variable {i} occurs in Γ", "LetRec", t)
            inner_gamma[x] = gamma[x]
        body_exp = dirac(ArrowS(NatS(Size(i, 1)), size_subst(nu, i, Size(i, 1))))
        sites = _occurrences(t.body, t.name)
        entries = [ty for ty, _ in mu_f.entries]
        combos = itertools.product(range(len(entries)), repeat=len(sites))
        last: Optional[ElaborationFailure] = None
        target = (t.name, mu_f)
        for n, combo in enumerate(combos):
            if n >= self.MAX_COMBOS:
                break
            inner = _Rec(t.name, entries, dict(zip(sites, combo)))
            try:
                p = self.elab(t.body, inner_gamma, body_exp, inner, ())
            except ElaborationFailure as e:
                last = e
                continue
            if p.theta is None:
                p = self.weaken(p, target)
            if _theta_eq(p.theta, target):
                d = Derivation(
                    "LetRec", dict(gamma), None, t,
                    dirac(ArrowS(NatS(r), size_subst(nu, i, r))), [p],
                    {"size_var": i, "nu": nu, "calls": calls, "r": r},
                )
                w = from_distribution_type(mu_f)
                if not is_ast(w):
                    self.fail(f"sized walk {w} is not AST", "LetRec", t)
                return self.coerce(d, exp)
            last = ElaborationFailure(
                f"recursive calls give {theta_str(p.theta)}, annotation requires {theta_str(target)}", "LetRec", t.span
            )
        if last is None:
            last = ElaborationFailure("no call-site assignment", "LetRec", t.span)
        raise last

    def e_App(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        gv, gw = self.split(gamma, t.fn.fv, t.arg.fv, "App", t)
        if isinstance(t.fn, S.LetRec):
            pw = self.elab(t.arg, gw, None, rec, path + (1,))
            s = _nat_of(pw.type)
            pv = self.elab(t.fn, gv, None, rec, path + (0,), r_hint=s)
        else:
            pv = self.elab(t.fn, gv, None, rec, path + (0,))
            arr = _arrow_of(pv.type)
            if arr is None:
                self.fail(f"applying a value of type {pv.type}", "App", t)
            pw = self.elab(t.arg, gw, dirac(arr.arg), rec, path + (1,))
        arr = _arrow_of(pv.type)
        if arr is None:
            self.fail(f"applying a value of type {pv.type}", "App", t)
        pw = self.coerce(pw, dirac(arr.arg))
        if pv.theta is not None and pw.theta is not None:
            self.fail("affinity: both function and argument use the distinguished variable", "App", t)
        th = pv.theta if pv.theta is not None else pw.theta
        d = Derivation("App", dict(gamma), th, t, arr.res, [pv, pw])
        return self.coerce(d, exp)

    def e_Let(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        body_fv = t.body.fv - {t.binder}
        gm, gn = self.split(gamma, t.bound.fv, body_fv, "Let", t)
        pm = self.elab(t.bound, gm, None, rec, path + (0,))
        attempts = [exp, None] if exp is not None else [None]
        last = None
        for body_exp in attempts:
            try:
                fam = [
                    self.elab(t.body, {**gn, t.binder: sigma}, body_exp, rec, path + (1,))
                    for sigma, _ in pm.type.entries
                ]
                ps = [q for _, q in pm.type.entries]
                psi = self._wsum([q.theta for q in fam], ps, t)
                if pm.theta is not None and psi is not None:
                    self.fail("affinity: the distinguished variable is used in both the bound term and the body", "Let", t)
                th = pm.theta if pm.theta is not None else psi
                ty = weighted_sum_types(zip(ps, [q.type for q in fam]))
                d = Derivation("Let", dict(gamma), th, t, ty, [pm] + fam)
                return self.coerce(d, exp)
            except ElaborationFailure as e:
                last = e
        raise last

    def _wsum(self, thetas, ps, t):
        try:
            return weighted_sum_ctx(thetas, ps)
        except UndefinedContextSum:
            pass
        # family members that do not use the variable can be weakened
        named = [th for th in thetas if th is not None]
        if not named:
            return None
        self.fail("family contexts disagree on the distinguished variable", "Let", t)

    def e_Choice(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        cands = [None]
        if exp is not None:
            cands.append(exp)
            cands.extend(dirac(ty) for ty, _ in exp.entries if dirac(ty) != exp)
        last = None
        cache: dict = {}

        def arm(side, e):
            key = (side, e)
            if key not in cache:
                term = t.left if side == 0 else t.right
                try:
                    cache[key] = self.elab(term, gamma, e, rec, path + (side,))
                except ElaborationFailure as err:
                    cache[key] = err
            if isinstance(cache[key], ElaborationFailure):
                raise cache[key]
            return cache[key]

        # prefer arms whose sum is exactly the expected type, so the
        # derivation needs no Sub at the choice itself
        fallback = None
        for el, er in itertools.product(cands, cands):
            try:
                pm, pn = arm(0, el), arm(1, er)
                if underlying(pm.type) != underlying(pn.type):
                    self.fail("choice arms have different underlying types", "Choice", t)
                try:
                    th = prob_sum_ctx(pm.theta, t.prob, pn.theta)
                except UndefinedContextSum as e:
                    self.fail(str(e), "Choice", t)
                ty = prob_sum_dist(pm.type, t.prob, pn.type)
                d = Derivation("Choice", dict(gamma), th, t, ty, [pm, pn])
                if exp is None or ty == exp:
                    return d
                if fallback is None:
                    fallback = self.coerce(d, exp)
            except ElaborationFailure as e:
                last = e
        if fallback is not None:
            return fallback
        raise last

    def e_Case(self, t, gamma, exp, rec, path, arg_hint, r_hint):
        vfv = t.scrutinee.fv
        bfv = t.succ.fv | t.zero.fv
        clash = [x for x in vfv & bfv if x in gamma]
        if clash:
            self.fail(f"scrutinee variables {clash} also occur in the branches", "Case", t)
        gv = {x: ty for x, ty in gamma.items() if x in vfv}
        gd = {x: ty for x, ty in gamma.items() if x not in vfv}
        pv = self.elab(t.scrutinee, gv, None, rec, path + (0,))
        if pv.theta is not None:
            self.fail("scrutinee uses the distinguished variable", "Case", t)
        s = _nat_of(pv.type)
        if s is None:
            self.fail("case on a non-Nat value", "Case", t)
        if not _is_hat(s):
            pv = self.coerce(pv, dirac(NatS(s.succ())))
            s = s.succ()
        arg = NatS(_pred(s))
        if exp is not None:
            pw = self.elab(t.succ, gd, dirac(ArrowS(arg, exp)), rec, path + (1,))
            pz = self.elab(t.zero, gd, exp, rec, path + (2,))
            mu = exp
        else:
            pw = self.elab(t.succ, gd, None, rec, path + (1,), arg_hint=arg)
            arr = _arrow_of(pw.type)
            if arr is None or arr.arg != arg:
                pw = self.coerce(pw, dirac(ArrowS(arg, arr.res))) if arr is not None else pw
                arr = _arrow_of(pw.type)
                if arr is None:
                    self.fail("successor branch is not a function", "Case", t)
            mu = arr.res
            try:
                pz = self.elab(t.zero, gd, mu, rec, path + (2,))
            except ElaborationFailure:
                pz = self.elab(t.zero, gd, None, rec, path + (2,))
                mu = _join(mu, pz.type)
                if mu is None:
                    self.fail("branches have incompatible types", "Case", t)
                pz = self.coerce(pz, mu)
                pw = self.coerce(pw, dirac(ArrowS(arg, mu)))
        if pw.theta is None and pz.theta is not None:
            pw = self.weaken(pw, pz.theta)
        elif pz.theta is None and pw.theta is not None:
            pz = self.weaken(pz, pw.theta)
        elif not _theta_eq(pw.theta, pz.theta):
            self.fail("branches use the distinguished variable differently", "Case", t)
        d = Derivation("Case", dict(gamma), pw.theta, t, mu, [pv, pw, pz])
        return self.coerce(d, exp)


def _join(a: DistType, b: DistType) -> Optional[DistType]:
    sa, sb = _nat_of(a), _nat_of(b)
    if sa is None or sb is None:
        return None
    if sa.is_inf or sb.is_inf or sa.var != sb.var:
        return dirac(NatS(INF))
    return dirac(NatS(Size(sa.var, max(sa.offset, sb.offset))))


def _occurrences(t, name: str, path=()) -> list:
    """Paths (as used by the elaborator) of free occurrences of ``name``."""
    t = S.unwrap(t)
    if name not in t.fv:
        return []
    if isinstance(t, S.Var):
        return [path]
    if isinstance(t, S.Succ):
        return _occurrences(t.arg, name, path + (0,))
    if isinstance(t, (S.Lam, S.LetRec)):
        return _occurrences(t.body, name, path + (0,))
    if isinstance(t, S.App):
        return _occurrences(t.fn, name, path + (0,)) + _occurrences(t.arg, name, path + (1,))
    if isinstance(t, S.Let):
        return _occurrences(t.bound, name, path + (0,)) + _occurrences(t.body, name, path + (1,))
    if isinstance(t, S.Choice):
        return _occurrences(t.left, name, path + (0,)) + _occurrences(t.right, name, path + (1,))
    if isinstance(t, S.Case):
        out = []
        for k, sub in enumerate((t.scrutinee, t.succ, t.zero)):
            out += _occurrences(sub, name, path + (k,))
        return out
    return []


def elaborate(t, gamma: Optional[dict] = None, theta: Theta = None, expected: Optional[DistType] = None) -> Derivation:
    """Build a derivation of ``gamma | theta ⊢ t : expected`` (or of a
    synthesised type).  The result is re-validated before it is returned."""
    gamma = dict(gamma or {})
    t = S.unwrap(t)
    env = {x: underlying(ty) for x, ty in gamma.items()}
    if theta is not None:
        env[theta[0]] = underlying(theta[1])
    try:
        check_simple(env, t)
    except SimpleTypeError as e:
        raise ElaborationFailure(str(e), e.rule, e.span) from e
    el = _Elab()
    if theta is None:
        d = el.elab(t, gamma, expected, None)
    else:
        x, mu = theta
        entries = [ty for ty, _ in mu.entries]
        sites = _occurrences(t, x)
        last = ElaborationFailure("no call-site assignment", "Var'")
        d = None
        for n, combo in enumerate(itertools.product(range(len(entries)), repeat=len(sites))):
            if n >= _Elab.MAX_COMBOS:
                break
            try:
                cand = el.elab(t, gamma, expected, _Rec(x, entries, dict(zip(sites, combo))))
            except ElaborationFailure as e:
                last = e
                continue
            if cand.theta is None:
                cand = el.weaken(cand, theta)
            if _theta_eq(cand.theta, theta):
                d = cand
                break
            last = ElaborationFailure(f"synthesised Θ {theta_str(cand.theta)} differs from {theta_str(theta)}", "Var'")
        if d is None:
            raise last
    try:
        check_derivation(d)
    except RuleViolation as e:  # pragma: no cover - elaborator bug guard
        raise ElaborationFailure(f"elaborated derivation does not check: {e}", e.rule) from e
    return d


# ---------------------------------------------------------------------------
# Expectation types, traces and bound probes
# ---------------------------------------------------------------------------


@dataclass
class TypedEntry:
    term: object
    type: DistType
    weight: Fraction
    derivation: Optional[Derivation] = None


def expectation_type(td: Sequence) -> DistType:
    """Σ p_i·μ_i over entries (term, μ_i, p_i)."""
    parts = []
    for e in td:
        term, mu, p = (e.term, e.type, e.weight) if isinstance(e, TypedEntry) else e
        p = Fraction(p)
        if p <= 0:
            raise ValueError("typed distribution weights must be positive")
        parts.append((p, mu))
    if not parts:
        raise ValueError("empty typed distribution")
    if sum(p for p, _ in parts) > 1:
        raise ValueError("typed distribution weights exceed 1")
    return weighted_sum_types(parts)


class TraceViolation(Exception):
    def __init__(self, index: int, which: str, detail: str):
        super().__init__(f"trace element {index}, condition ({which}): {detail}")
        self.index = index
        self.which = which
        self.detail = detail


def check_reduction_trace(trace: Sequence[Sequence[TypedEntry]]) -> None:
    """(a) every entry is derivable, (b) consecutive term distributions are
    related by one reduction step, (c) expectation types agree."""
    prev_terms = None
    prev_exp = None
    for k, elem in enumerate(trace):
        for e in elem:
            if e.derivation is None:
                raise TraceViolation(k, "a", f"entry {S.pretty(e.term)} has no derivation")
            d = e.derivation
            if d.gamma or d.theta is not None:
                raise TraceViolation(k, "a", "trace derivations must be closed")
            if d.subject != S.unwrap(e.term) or d.type != e.type:
                raise TraceViolation(k, "a", f"derivation does not conclude {S.pretty(e.term)} : {e.type}")
            try:
                check_derivation(d)
            except RuleViolation as err:
                raise TraceViolation(k, "a", str(err)) from err
        terms = collapse((S.as_term(e.term), Fraction(e.weight)) for e in elem)
        try:
            exp = expectation_type(elem)
        except (ValueError, UnderlyingMismatch) as err:
            raise TraceViolation(k, "c", str(err)) from err
        if prev_terms is not None:
            stepped = step_dist(prev_terms)
            if stepped != terms:
                raise TraceViolation(k, "b", f"expected {stepped}, got {terms}")
            if exp != prev_exp:
                raise TraceViolation(k, "c", f"expectation type {exp} differs from {prev_exp}")
        prev_terms, prev_exp = terms, exp


class BoundViolation(Exception):
    def __init__(self, value, available):
        super().__init__(f"value {value} does not fit the sizes {available}")
        self.value = value
        self.available = available


def interpret_size(s: Size, env: Optional[dict] = None) -> Optional[int]:
    """Numeric bound of a size (None for infinity); variables default to 0."""
    if s.is_inf:
        return None
    return (env or {}).get(s.var, 0) + s.offset


def check_nat_bound(t, mu: DistType, n: int, env: Optional[dict] = None) -> None:
    """Check that the n-step value distribution of ``t`` can be transported
    into ``mu``: mass on numeral k may only go to entries Nat^s with
    k < [[s]], within the weight of each entry."""
    caps = []
    for ty, p in mu.items():
        if not isinstance(ty, NatS):
            raise ValueError(f"{ty} is not a Nat type")
        caps.append((interpret_size(ty.size, env), p))
    rep = eval_n(t, n)
    masses: Dict[int, Fraction] = {}
    for v, p in rep.value_mass.items():
        k = S.decode_nat(v)
        if k is None:
            raise BoundViolation(S.pretty(v), [str(ty) for ty in mu])
        masses[k] = masses.get(k, Fraction(0)) + p
    # nested admissible sets: Hall's condition on upper sets suffices
    for k in sorted(masses, reverse=True):
        demand = sum(q for j, q in masses.items() if j >= k)
        supply = sum(p for b, p in caps if b is None or b > k)
        if demand > supply:
            raise BoundViolation(k, [str(ty) for ty in mu])
