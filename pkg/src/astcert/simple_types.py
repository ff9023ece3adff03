"""Affine simple types.

Higher-order variables may be used at most once per probabilistic branch;
variables of type Nat are unrestricted.  The checker synthesises, for each
subterm, its type together with the context of variables it actually uses,
and merges those contexts with affine contraction (application, let, case)
or union contraction (choice, case branches).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import syntax as S


@dataclass(frozen=True)
class NatT:
    def __str__(self):
        return "Nat"


@dataclass(frozen=True)
class ArrowT:
    arg: "SimpleType"
    res: "SimpleType"

    def __str__(self):
        a = f"({self.arg})" if isinstance(self.arg, ArrowT) else str(self.arg)
        return f"{a} -> {self.res}"


SimpleType = object  # NatT | ArrowT
NAT = NatT()


class SimpleTypeError(Exception):
    rule = "?"

    def __init__(self, message: str, name: Optional[str] = None, span=None, rule: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.name = name
        self.span = span
        if rule:
            self.rule = rule

    def record(self) -> dict:
        return {
            "error": type(self).__name__,
            "rule": self.rule,
            "variable": self.name,
            "span": list(self.span) if self.span else None,
            "message": self.message,
        }

    def __str__(self):
        where = f" at {self.span[0]}:{self.span[1]}" if self.span else ""
        return f"{type(self).__name__}({self.name or ''}){where}: {self.message}"


class AffinityViolation(SimpleTypeError):
    pass


class TypeMismatch(SimpleTypeError):
    pass


class UnboundVariable(SimpleTypeError):
    pass


class MissingAnnotation(SimpleTypeError):
    pass


def contract_union(g: dict, d: dict) -> dict:
    out = dict(g)
    for x, t in d.items():
        if x in out and out[x] != t:
            raise TypeMismatch(f"{x} used at {out[x]} and at {t}", x)
        out[x] = t
    return out


def contract_affine(g: dict, d: dict) -> dict:
    out = dict(g)
    for x, t in d.items():
        if x in out:
            if out[x] != t:
                raise TypeMismatch(f"{x} used at {out[x]} and at {t}", x)
            if t != NAT:
                raise AffinityViolation(f"higher-order variable {x} used twice in one branch", x)
        out[x] = t
    return out


def _binder_type(annot):
    from .sized import underlying

    return underlying(annot) if annot is not None else None


def letrec_simple_type(v: S.LetRec):
    if v.annot is None:
        return ArrowT(NAT, NAT)
    from .sized import underlying

    return ArrowT(NAT, underlying(v.annot.nu))


def check_simple(g: dict, t, annotations=None):
    """Type ``t`` (a term or value) under ``g`` and return its simple type.

    ``annotations`` may map binder names to simple types for binders that
    carry no inline annotation.
    """
    return _Checker(dict(g), annotations or {}).synth(t, dict(g))[0]


def check_simple_used(g: dict, t, annotations=None):
    """Return (type, used context)."""
    return _Checker(dict(g), annotations or {}).synth(t, dict(g))


class _Checker:
    def __init__(self, g, annotations):
        self.annotations = annotations
        self.defaulted: set = set()

    def _span(self, node):
        return getattr(node, "span", None)

    def synth(self, t, env):
        if isinstance(t, S.Var):
            if t.name not in env:
                raise UnboundVariable(f"unbound variable {t.name}", t.name, t.span, "Var")
            return env[t.name], {t.name: env[t.name]}
        if isinstance(t, S.Zero):
            return NAT, {}
        if isinstance(t, S.Succ):
            ty, used = self.synth(t.arg, env)
            if ty != NAT:
                raise TypeMismatch(f"S applied to a value of type {ty}", None, t.span, "Succ")
            return NAT, used
        if isinstance(t, S.Val):
            return self.synth(t.value, env)
        if isinstance(t, S.Lam):
            a = _binder_type(t.annot) or self.annotations.get(t.binder)
            if a is None:
                a = NAT
                self.defaulted.add(t.binder)
            ty, used = self.synth(t.body, {**env, t.binder: a})
            used = {k: v for k, v in used.items() if k != t.binder}
            return ArrowT(a, ty), used
        if isinstance(t, S.LetRec):
            fty = letrec_simple_type(t)
            ty, used = self.synth(t.body, {**env, t.name: fty})
            if ty != fty:
                raise TypeMismatch(
                    f"letrec body has type {ty}, expected {fty}", t.name, t.span, "letrec"
                )
            used = {k: v for k, v in used.items() if k != t.name}
            for x, tx in used.items():
                if tx != NAT:
                    raise TypeMismatch(
                        f"letrec body uses {x} of higher-order type {tx}", x, t.span, "letrec"
                    )
            return fty, used
        if isinstance(t, S.App):
            fty, u1 = self.synth(t.fn, env)
            aty, u2 = self.synth(t.arg, env)
            if not isinstance(fty, ArrowT):
                if isinstance(t.fn, S.Var) and t.fn.name in self.defaulted:
                    raise MissingAnnotation(
                        f"binder {t.fn.name} is applied but carries no type annotation",
                        t.fn.name, t.span, "App",
                    )
                raise TypeMismatch(f"applying a value of type {fty}", None, t.span, "App")
            if fty.arg != aty:
                if isinstance(t.arg, S.Var) and t.arg.name in self.defaulted:
                    raise MissingAnnotation(
                        f"binder {t.arg.name} is used at {fty.arg} but carries no annotation",
                        t.arg.name, t.span, "App",
                    )
                raise TypeMismatch(
                    f"argument has type {aty}, expected {fty.arg}", None, t.span, "App"
                )
            return fty.res, self._affine(u1, u2, t, "App")
        if isinstance(t, S.Let):
            mty, u1 = self.synth(t.bound, env)
            nty, u2 = self.synth(t.body, {**env, t.binder: mty})
            u2 = {k: v for k, v in u2.items() if k != t.binder}
            return nty, self._affine(u1, u2, t, "Let")
        if isinstance(t, S.Choice):
            lty, u1 = self.synth(t.left, env)
            rty, u2 = self.synth(t.right, env)
            if lty != rty:
                raise TypeMismatch(f"choice arms have types {lty} and {rty}", None, t.span, "Choice")
            return lty, self._union(u1, u2, t, "Choice")
        if isinstance(t, S.Case):
            sty, u0 = self.synth(t.scrutinee, env)
            if sty != NAT:
                raise TypeMismatch(f"case on a value of type {sty}", None, t.span, "Case")
            wty, u1 = self.synth(t.succ, env)
            zty, u2 = self.synth(t.zero, env)
            if wty != ArrowT(NAT, zty):
                raise TypeMismatch(
                    f"case branches have types {wty} and {zty}", None, t.span, "Case"
                )
            return zty, self._affine(u0, self._union(u1, u2, t, "Case"), t, "Case")
        raise TypeError(f"not a term: {t!r}")

    def _affine(self, a, b, node, rule):
        try:
            return contract_affine(a, b)
        except SimpleTypeError as e:
            e.span = e.span or self._span(node)
            e.rule = rule
            raise

    def _union(self, a, b, node, rule):
        try:
            return contract_union(a, b)
        except SimpleTypeError as e:
            e.span = e.span or self._span(node)
            e.rule = rule
            raise
