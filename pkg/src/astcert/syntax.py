"""Abstract syntax, parser and printer for the probabilistic lambda-calculus.

Terms are kept in A-normal form: applications take two values, ``case``
scrutinises a value and branches are values.  The parser accepts a little
sugar on top (numerals, general application, ``S`` applied to a term,
``M ; N``) and desugars it into ANF.

Concrete syntax::

    term   := "let" x "=" term "in" term | seq
    seq    := choice [";" seq]
    choice := app ["(+" rational ")" arm]
    app    := atom atom*
    atom   := x | n | "S" atom | "(" term ")"
            | "\\" x [":" type] "." term
            | "letrec" x ["[" annot "]"] "=" term
            | "case" term "of" "{" "S" "->" term "|" "0" "->" term "}"
    annot  := i ":" dtype "|" size "^" rational ("," size "^" rational)*

Line comments start with ``--``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional


class ParseError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------


class Node:
    """Immutable AST node with structural equality and a cached hash.

    ``span`` (line, column) is carried for error messages but ignored by
    equality and hashing.
    """

    _fields: tuple = ()

    def _key(self):
        return tuple(getattr(self, f) for f in self._fields)

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
        return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __ne__(self, other):
        return not self == other

    @property
    def fv(self) -> frozenset:
        cached = self.__dict__.get("_fv")
        if cached is None:
            cached = frozenset(_free(self))
            object.__setattr__(self, "_fv", cached)
        return cached

    def __str__(self):
        return pretty(self)


class Value(Node):
    pass


class Term(Node):
    pass


@dataclass(frozen=True, eq=False, repr=False)
class Var(Value):
    name: str
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("name",)

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Zero(Value):
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ()

    def __repr__(self):
        return "Zero()"


@dataclass(frozen=True, eq=False, repr=False)
class Succ(Value):
    arg: Value
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("arg",)

    def __repr__(self):
        return f"Succ({self.arg!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Lam(Value):
    binder: str
    body: Term
    annot: object = None  # SizedType or None
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("binder", "body", "annot")

    def __repr__(self):
        return f"Lam({self.binder!r}, {self.body!r})"


@dataclass(frozen=True)
class RecAnnot:
    """Annotation ``[i : nu | s_1 ^ p_1, ...]`` of a ``letrec``."""

    var: str
    nu: object  # DistType
    calls: tuple  # ((Size, Fraction), ...)

    def __str__(self):
        calls = ", ".join(f"{s} ^ {_rat(p)}" for s, p in self.calls)
        return f"[{self.var} : {self.nu} | {calls}]"


@dataclass(frozen=True, eq=False, repr=False)
class LetRec(Value):
    name: str
    body: Value
    annot: Optional[RecAnnot] = None
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("name", "body", "annot")

    def __repr__(self):
        return f"LetRec({self.name!r}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Val(Term):
    value: Value
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("value",)

    def __repr__(self):
        return f"Val({self.value!r})"


@dataclass(frozen=True, eq=False, repr=False)
class App(Term):
    fn: Value
    arg: Value
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("fn", "arg")

    def __repr__(self):
        return f"App({self.fn!r}, {self.arg!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Let(Term):
    binder: str
    bound: Term
    body: Term
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("binder", "bound", "body")

    def __repr__(self):
        return f"Let({self.binder!r}, {self.bound!r}, {self.body!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Choice(Term):
    left: Term
    prob: Fraction
    right: Term
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("left", "prob", "right")

    def __post_init__(self):
        p = Fraction(self.prob)
        if not 0 < p < 1:
            raise ValueError(f"choice probability must lie in ]0,1[, got {p}")
        object.__setattr__(self, "prob", p)

    def __repr__(self):
        return f"Choice({self.left!r}, {self.prob}, {self.right!r})"


@dataclass(frozen=True, eq=False, repr=False)
class Case(Term):
    scrutinee: Value
    succ: Value
    zero: Value
    span: Optional[tuple] = field(default=None, compare=False)
    _fields = ("scrutinee", "succ", "zero")

    def __repr__(self):
        return f"Case({self.scrutinee!r}, {self.succ!r}, {self.zero!r})"


def _free(node) -> set:
    if isinstance(node, Var):
        return {node.name}
    if isinstance(node, Zero):
        return set()
    if isinstance(node, Succ):
        return set(node.arg.fv)
    if isinstance(node, Lam):
        return set(node.body.fv) - {node.binder}
    if isinstance(node, LetRec):
        return set(node.body.fv) - {node.name}
    if isinstance(node, Val):
        return set(node.value.fv)
    if isinstance(node, App):
        return node.fn.fv | node.arg.fv
    if isinstance(node, Let):
        return node.bound.fv | (node.body.fv - {node.binder})
    if isinstance(node, Choice):
        return node.left.fv | node.right.fv
    if isinstance(node, Case):
        return node.scrutinee.fv | node.succ.fv | node.zero.fv
    raise TypeError(f"not a term or value: {node!r}")


def free_vars(t: Node) -> frozenset:
    return t.fv


def is_value_term(t: Term) -> bool:
    return isinstance(t, Val)


def as_term(x: Node) -> Term:
    return Val(x) if isinstance(x, Value) else x


def unwrap(x: Node) -> Node:
    """Values wrapped in ``Val`` are identified with the value itself."""
    return x.value if isinstance(x, Val) else x


def encode_nat(n: int) -> Value:
    if n < 0:
        raise ValueError("numerals are non-negative")
    v: Value = Zero()
    for _ in range(n):
        v = Succ(v)
    return v


def decode_nat(v: Node) -> Optional[int]:
    v = unwrap(v)
    n = 0
    while isinstance(v, Succ):
        v = v.arg
        n += 1
    return n if isinstance(v, Zero) else None


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------


def _fresh(base: str, avoid) -> str:
    stem = base.rstrip("0123456789").rstrip("_") or base
    k = 1
    while f"{stem}_{k}" in avoid:
        k += 1
    return f"{stem}_{k}"


def subst_value(t: Node, x: str, v: Value) -> Node:
    """Capture-avoiding ``t[v/x]`` on terms or values."""
    if x not in t.fv:
        return t
    return _subst(t, x, v, v.fv)


def _subst(t, x, v, vfv):
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return v
    if isinstance(t, Succ):
        return Succ(_subst(t.arg, x, v, vfv))
    if isinstance(t, Lam):
        b, body = t.binder, t.body
        if b in vfv:
            nb = _fresh(b, vfv | body.fv | {x})
            body = _subst(body, b, Var(nb), frozenset({nb}))
            b = nb
        return Lam(b, _subst(body, x, v, vfv), t.annot)
    if isinstance(t, LetRec):
        f, body = t.name, t.body
        if f in vfv:
            nf = _fresh(f, vfv | body.fv | {x})
            body = _subst(body, f, Var(nf), frozenset({nf}))
            f = nf
        return LetRec(f, _subst(body, x, v, vfv), t.annot)
    if isinstance(t, Val):
        return Val(_subst(t.value, x, v, vfv))
    if isinstance(t, App):
        return App(_subst(t.fn, x, v, vfv), _subst(t.arg, x, v, vfv))
    if isinstance(t, Let):
        bound = _subst(t.bound, x, v, vfv)
        b, body = t.binder, t.body
        if b != x and x in body.fv:
            if b in vfv:
                nb = _fresh(b, vfv | body.fv | {x})
                body = _subst(body, b, Var(nb), frozenset({nb}))
                b = nb
            body = _subst(body, x, v, vfv)
        return Let(b, bound, body)
    if isinstance(t, Choice):
        return Choice(_subst(t.left, x, v, vfv), t.prob, _subst(t.right, x, v, vfv))
    if isinstance(t, Case):
        return Case(
            _subst(t.scrutinee, x, v, vfv),
            _subst(t.succ, x, v, vfv),
            _subst(t.zero, x, v, vfv),
        )
    raise TypeError(f"not a term or value: {t!r}")


def alpha_equal(a: Node, b: Node) -> bool:
    return _alpha(a, b, {}, {})


def _alpha(a, b, ea, eb) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, Var):
        return ea.get(a.name, a.name) == eb.get(b.name, b.name) and (
            (a.name in ea) == (b.name in eb)
        )
    if isinstance(a, Zero):
        return True
    if isinstance(a, Succ):
        return _alpha(a.arg, b.arg, ea, eb)
    if isinstance(a, (Lam, LetRec)):
        na = a.binder if isinstance(a, Lam) else a.name
        nb = b.binder if isinstance(b, Lam) else b.name
        tag = object()
        return a.annot == b.annot and _alpha(
            a.body, b.body, {**ea, na: tag}, {**eb, nb: tag}
        )
    if isinstance(a, Val):
        return _alpha(a.value, b.value, ea, eb)
    if isinstance(a, App):
        return _alpha(a.fn, b.fn, ea, eb) and _alpha(a.arg, b.arg, ea, eb)
    if isinstance(a, Let):
        tag = object()
        return _alpha(a.bound, b.bound, ea, eb) and _alpha(
            a.body, b.body, {**ea, a.binder: tag}, {**eb, b.binder: tag}
        )
    if isinstance(a, Choice):
        return (
            a.prob == b.prob
            and _alpha(a.left, b.left, ea, eb)
            and _alpha(a.right, b.right, ea, eb)
        )
    if isinstance(a, Case):
        return all(
            _alpha(x, y, ea, eb)
            for x, y in zip(
                (a.scrutinee, a.succ, a.zero), (b.scrutinee, b.succ, b.zero)
            )
        )
    raise TypeError(a)


def binders(t: Node) -> Iterator[str]:
    if isinstance(t, Lam):
        yield t.binder
        yield from binders(t.body)
    elif isinstance(t, LetRec):
        yield t.name
        yield from binders(t.body)
    elif isinstance(t, Let):
        yield t.binder
        yield from binders(t.bound)
        yield from binders(t.body)
    elif isinstance(t, Succ):
        yield from binders(t.arg)
    elif isinstance(t, Val):
        yield from binders(t.value)
    elif isinstance(t, App):
        yield from binders(t.fn)
        yield from binders(t.arg)
    elif isinstance(t, Choice):
        yield from binders(t.left)
        yield from binders(t.right)
    elif isinstance(t, Case):
        for sub in (t.scrutinee, t.succ, t.zero):
            yield from binders(sub)


def freshen(t: Node) -> Node:
    """Rename binders so that every binder is distinct and differs from
    every free variable.  Terms whose binders are already unique are
    returned unchanged."""
    used = set(t.fv)
    seen: set = set()

    def pick(name):
        if name in seen or name in used:
            new = _fresh(name, used | seen | all_names)
        else:
            new = name
        seen.add(new)
        return new

    all_names = set(binders(t)) | set(t.fv)

    def go(n, env):
        if isinstance(n, Var):
            new = env.get(n.name, n.name)
            return n if new == n.name else Var(new, n.span)
        if isinstance(n, Zero):
            return n
        if isinstance(n, Succ):
            return Succ(go(n.arg, env), n.span)
        if isinstance(n, Lam):
            b = pick(n.binder)
            return Lam(b, go(n.body, {**env, n.binder: b}), n.annot, n.span)
        if isinstance(n, LetRec):
            f = pick(n.name)
            return LetRec(f, go(n.body, {**env, n.name: f}), n.annot, n.span)
        if isinstance(n, Val):
            return Val(go(n.value, env), n.span)
        if isinstance(n, App):
            return App(go(n.fn, env), go(n.arg, env), n.span)
        if isinstance(n, Let):
            bound = go(n.bound, env)
            b = pick(n.binder)
            return Let(b, bound, go(n.body, {**env, n.binder: b}), n.span)
        if isinstance(n, Choice):
            return Choice(go(n.left, env), n.prob, go(n.right, env), n.span)
        if isinstance(n, Case):
            return Case(
                go(n.scrutinee, env), go(n.succ, env), go(n.zero, env), n.span
            )
        raise TypeError(n)

    return go(t, {})


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------


def _rat(p) -> str:
    p = Fraction(p)
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def _atom_value(v: Value) -> str:
    s = _pv(v)
    if isinstance(v, (Lam, LetRec)) or (isinstance(v, Succ) and decode_nat(v) is None):
        return f"({s})"
    return s


def _pv(v: Value) -> str:
    if isinstance(v, Var):
        return v.name
    n = decode_nat(v)
    if n is not None:
        return str(n)
    if isinstance(v, Succ):
        return f"S {_atom_value(v.arg)}"
    if isinstance(v, Lam):
        ann = f" : {v.annot}" if v.annot is not None else ""
        return f"\\{v.binder}{ann}. {_pt(v.body)}"
    if isinstance(v, LetRec):
        ann = f" {v.annot}" if v.annot is not None else ""
        return f"letrec {v.name}{ann} = {_pv(v.body)}"
    raise TypeError(v)


def _arm(t: Term) -> str:
    s = _pt(t)
    if isinstance(t, App) or (isinstance(t, Val) and not isinstance(t.value, (Lam, LetRec))):
        return s
    return f"({s})"


def _pt(t: Term) -> str:
    if isinstance(t, Val):
        return _pv(t.value)
    if isinstance(t, App):
        return f"{_atom_value(t.fn)} {_atom_value(t.arg)}"
    if isinstance(t, Let):
        return f"let {t.binder} = {_pt(t.bound)} in {_pt(t.body)}"
    if isinstance(t, Choice):
        return f"{_arm(t.left)} (+ {_rat(t.prob)}) {_arm(t.right)}"
    if isinstance(t, Case):
        return (
            f"case {_atom_value(t.scrutinee)} of "
            f"{{ S -> {_pv(t.succ)} | 0 -> {_pv(t.zero)} }}"
        )
    raise TypeError(t)


def pretty(t: Node) -> str:
    return _pv(t) if isinstance(t, Value) else _pt(t)


# ---------------------------------------------------------------------------
# Lexer / parser
# ---------------------------------------------------------------------------

KEYWORDS = {"let", "in", "case", "of", "letrec", "S", "Nat", "inf"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|--[^\n]*)
  | (?P<choice>\(\s*\+)
  | (?P<arrow>->)
  | (?P<num>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<sym>[()\[\]{}\\λ.:|=;^,+/])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(src: str) -> list:
    tokens = []
    pos, line, col = 0, 1, 1
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", line, col)
        text = m.group()
        kind = m.lastgroup
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            elif kind == "sym" and text == "λ":
                text = "\\"
            tokens.append(Token(kind, text, line, col))
        nl = text.count("\n")
        if nl:
            line += nl
            col = len(text) - text.rfind("\n")
        else:
            col += len(text)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class Parser:
    def __init__(self, src: str):
        from . import sized  # deferred: sized imports simple_types imports syntax

        self._sized = sized
        self.toks = tokenize(src)
        self.i = 0
        self._names = {t.text for t in self.toks if t.kind == "ident"}
        self._counter = 0

    # -- token helpers
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text, kind=None) -> bool:
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind != "eof"

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text) -> Token:
        if not self.at(text):
            self.error(f"expected {text!r}")
        return self.advance()

    def ident(self) -> Token:
        if self.tok.kind != "ident":
            self.error("expected identifier")
        return self.advance()

    def error(self, msg):
        t = self.tok
        found = t.text or "end of input"
        raise ParseError(f"{msg}, found {found!r}", t.line, t.col)

    def fresh(self) -> str:
        while True:
            self._counter += 1
            name = f"_t{self._counter}"
            if name not in self._names:
                self._names.add(name)
                return name

    # -- sugar
    def mk_app(self, m: Term, n: Term, span) -> Term:
        binds = []
        if isinstance(m, Val):
            fv = m.value
        else:
            x = self.fresh()
            binds.append((x, m))
            fv = Var(x)
        if isinstance(n, Val):
            av = n.value
        else:
            y = self.fresh()
            binds.append((y, n))
            av = Var(y)
        out: Term = App(fv, av, span)
        for x, bound in reversed(binds):
            out = Let(x, bound, out, span)
        return out

    def mk_succ(self, m: Term, span) -> Term:
        if isinstance(m, Val):
            return Val(Succ(m.value, span), span)
        x = self.fresh()
        return Let(x, m, Val(Succ(Var(x), span), span), span)

    def require_value(self, t: Term, what: str, tok: Token) -> Value:
        if not isinstance(t, Val):
            raise ParseError(f"{what} must be a value (not ANF-desugarable)", tok.line, tok.col)
        return t.value

    # -- grammar
    def parse_program(self) -> Term:
        t = self.term()
        if self.tok.kind != "eof":
            self.error("unexpected trailing input")
        return t

    def term(self) -> Term:
        if self.at("let", "kw"):
            start = self.advance()
            x = self.ident().text
            self.expect("=")
            bound = self.term()
            self.expect("in")
            body = self.term()
            return Let(x, bound, body, (start.line, start.col))
        return self.seq()

    def seq(self) -> Term:
        start = self.tok
        left = self.choice()
        if self.at(";"):
            self.advance()
            right = self.seq()
            span = (start.line, start.col)
            # M ; N  ==  (\a. \b. 0) M N
            a, b = self.fresh(), self.fresh()
            k = Val(Lam(a, Val(Lam(b, Val(Zero())))))
            return self.mk_app(self.mk_app(k, left, span), right, span)
        return left

    def choice(self) -> Term:
        start = self.tok
        left = self.app()
        if self.tok.kind == "choice":
            self.advance()
            p = self.rational()
            self.expect(")")
            if not 0 < p < 1:
                raise ParseError(f"choice probability must lie in ]0,1[, got {p}", start.line, start.col)
            right = self.term() if self.at("let", "kw") else self.choice()
            return Choice(left, p, right, (start.line, start.col))
        return left

    def _starts_atom(self) -> bool:
        t = self.tok
        if t.kind in ("ident", "num"):
            return True
        return t.text in ("(", "\\", "S", "letrec", "case") and t.kind in ("sym", "kw")

    def app(self) -> Term:
        start = self.tok
        if not self._starts_atom():
            self.error("expected a term")
        out = self.atom()
        while self._starts_atom():
            arg = self.atom()
            out = self.mk_app(out, arg, (start.line, start.col))
        return out

    def atom(self) -> Term:
        t = self.tok
        span = (t.line, t.col)
        if t.kind == "ident":
            self.advance()
            return Val(Var(t.text, span), span)
        if t.kind == "num":
            self.advance()
            return Val(encode_nat(int(t.text)), span)
        if self.at("S", "kw"):
            self.advance()
            return self.mk_succ(self.atom(), span)
        if self.at("("):
            self.advance()
            inner = self.term()
            self.expect(")")
            return inner
        if self.at("\\"):
            self.advance()
            x = self.ident().text
            annot = None
            if self.at(":"):
                self.advance()
                annot = self.sized_type()
            self.expect(".")
            body = self.term()
            return Val(Lam(x, body, annot, span), span)
        if self.at("letrec", "kw"):
            self.advance()
            f = self.ident().text
            annot = None
            if self.at("["):
                annot = self.rec_annot()
            self.expect("=")
            rhs_tok = self.tok
            body = self.require_value(self.term(), "letrec body", rhs_tok)
            return Val(LetRec(f, body, annot, span), span)
        if self.at("case", "kw"):
            self.advance()
            scrut = self.term()
            self.expect("of")
            self.expect("{")
            self.expect("S")
            self.expect("->")
            wt = self.tok
            w = self.require_value(self.term(), "case successor branch", wt)
            self.expect("|")
            if not (self.tok.kind == "num" and self.tok.text == "0"):
                self.error("expected '0'")
            self.advance()
            self.expect("->")
            zt = self.tok
            z = self.require_value(self.term(), "case zero branch", zt)
            self.expect("}")
            if isinstance(scrut, Val):
                return Case(scrut.value, w, z, span)
            x = self.fresh()
            return Let(x, scrut, Case(Var(x), w, z, span), span)
        self.error("expected a term")

    # -- rationals, sizes and types
    def rational(self) -> Fraction:
        t = self.tok
        if t.kind != "num":
            self.error("expected a rational a/b")
        self.advance()
        num = int(t.text)
        if self.at("/"):
            self.advance()
            d = self.tok
            if d.kind != "num":
                self.error("expected denominator")
            self.advance()
            if int(d.text) == 0:
                raise ParseError("zero denominator", d.line, d.col)
            return Fraction(num, int(d.text))
        return Fraction(num)

    def size(self):
        S = self._sized
        if self.at("inf", "kw"):
            self.advance()
            return S.INF
        v = self.ident().text
        k = 0
        if self.at("+"):
            self.advance()
            t = self.tok
            if t.kind != "num":
                self.error("expected successor count")
            self.advance()
            k = int(t.text)
        return S.Size(v, k)

    def sized_type(self):
        S = self._sized
        if self.at("("):
            self.advance()
            base = self.sized_type()
            self.expect(")")
        else:
            self.expect("Nat")
            s = S.INF
            if self.at("["):
                self.advance()
                s = self.size()
                self.expect("]")
            base = S.NatS(s)
        if self.tok.kind == "arrow":
            self.advance()
            return S.ArrowS(base, self.dist_type())
        return base

    def dist_type(self):
        S = self._sized
        if self.at("{"):
            self.advance()
            entries = []
            while True:
                t = self.sized_type()
                self.expect("^")
                entries.append((t, self.rational()))
                if self.at(","):
                    self.advance()
                    continue
                break
            self.expect("}")
            try:
                return S.DistType(entries)
            except ValueError as e:
                self.error(str(e))
        return S.DistType.dirac(self.sized_type())

    def rec_annot(self) -> RecAnnot:
        self.expect("[")
        var = self.ident().text
        self.expect(":")
        nu = self.dist_type()
        self.expect("|")
        calls = []
        while True:
            s = self.size()
            self.expect("^")
            calls.append((s, self.rational()))
            if self.at(","):
                self.advance()
                continue
            break
        self.expect("]")
        return RecAnnot(var, nu, tuple(calls))


def parse(source: str) -> Term:
    """Parse a program into an ANF term with unique binders."""
    return freshen(Parser(source).parse_program())


def parse_value(source: str) -> Value:
    t = parse(source)
    if not isinstance(t, Val):
        raise ParseError("expected a value")
    return t.value


def parse_type(source: str):
    p = Parser(source)
    t = p.sized_type()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return t


def parse_dist_type(source: str):
    p = Parser(source)
    t = p.dist_type()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return t


def parse_size(source: str):
    p = Parser(source)
    s = p.size()
    if p.tok.kind != "eof":
        p.error("unexpected trailing input")
    return s
