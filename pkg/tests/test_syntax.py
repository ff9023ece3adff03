from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from astcert import syntax as S
from astcert.syntax import (
    App, Case, Choice, Lam, Let, LetRec, Succ, Val, Var, Zero,
    alpha_equal, decode_nat, encode_nat, free_vars, parse, pretty, subst_value,
)
from generators import nat_terms


def test_choice_of_zeros():
    assert parse("0 (+ 1/2) 0") == Choice(Val(Zero()), Fraction(1, 2), Val(Zero()))


def test_identity():
    assert parse(r"\x. x") == Val(Lam("x", Val(Var("x"))))


def test_bias_recursion_shape():
    t = parse(r"letrec f = \x. case x of { S -> \y. (f y) (+ 2/3) (f (S (S y))) | 0 -> 0 }")
    expected = LetRec(
        "f",
        Lam("x", Case(Var("x"),
                      Lam("y", Choice(App(Var("f"), Var("y")), Fraction(2, 3),
                                      App(Var("f"), Succ(Succ(Var("y")))))),
                      Zero())),
    )
    assert t == Val(expected)


def test_numerals_desugar():
    assert parse("3") == Val(encode_nat(3))
    assert encode_nat(3) == Succ(Succ(Succ(Zero())))
    assert encode_nat(0) == Zero()


@pytest.mark.parametrize("n", [0, 1, 2, 7, 40])
def test_decode_encode(n):
    assert decode_nat(encode_nat(n)) == n


def test_decode_non_numeral():
    assert decode_nat(Lam("x", Val(Var("x")))) is None
    assert decode_nat(Succ(Var("x"))) is None


def test_general_application_is_let_bound():
    t = parse(r"(\x. x) ((\y. y) 0)")
    assert isinstance(t, Let)
    assert isinstance(t.bound, App) and isinstance(t.body, App)
    assert t.body.arg == Var(t.binder)


def test_succ_of_term_is_let_bound():
    t = parse(r"S ((\y. y) 0)")
    assert isinstance(t, Let) and t.body == Val(Succ(Var(t.binder)))


def test_sequence_sugar():
    t = parse("0 ; 1")
    # (\a.\b.0) 0 1 : two value applications, one let for the inner one
    assert isinstance(t, Let)
    assert isinstance(t.bound, App) and isinstance(t.bound.fn, Lam)


def test_case_scrutinee_desugars():
    t = parse(r"case ((\y. y) 1) of { S -> \z. z | 0 -> 0 }")
    assert isinstance(t, Let) and isinstance(t.body, Case)


def test_case_branch_must_be_value():
    with pytest.raises(S.ParseError):
        parse(r"case 1 of { S -> (\z. z) 0 | 0 -> 0 }")


@pytest.mark.parametrize("src", ["0 (+ 3/2) 1", "0 (+ 0) 1", "(\\x. x", "let x = 0 0", "0 (+ 1/0) 0"])
def test_parse_errors(src):
    with pytest.raises(S.ParseError):
        parse(src)


def test_parse_error_position():
    with pytest.raises(S.ParseError) as e:
        parse("let x = 0 in\n  )")
    assert e.value.line == 2 and e.value.col == 3


def test_comments_and_unicode_lambda():
    assert parse("-- a comment\nλx. x -- trailing") == parse(r"\x. x")


def test_subst_examples():
    assert subst_value(Val(Var("x")), "x", Zero()) == Val(Zero())
    assert subst_value(Val(Var("y")), "x", Zero()) == Val(Var("y"))
    one = Succ(Zero())
    assert subst_value(App(Var("f"), Var("x")), "x", one) == App(Var("f"), one)


def test_subst_respects_binding():
    t = Lam("x", Val(Var("x")))
    assert subst_value(t, "x", Zero()) == t
    t = Let("x", Val(Var("x")), Val(Var("x")))
    assert subst_value(t, "x", Zero()) == Let("x", Val(Zero()), Val(Var("x")))


def test_subst_avoids_capture():
    # (\y. x)[y/x] must not capture
    out = subst_value(Lam("y", Val(Var("x"))), "x", Var("y"))
    assert isinstance(out, Lam) and out.binder != "y" and out.body == Val(Var("y"))


def test_free_vars():
    assert free_vars(Val(Zero())) == frozenset()
    assert free_vars(App(Var("f"), Var("x"))) == {"f", "x"}
    assert free_vars(LetRec("f", Lam("x", App(Var("f"), Var("x"))))) == frozenset()


def test_binders_unique_after_parse():
    t = parse(r"(\x. x) ((\x. x) 0)")
    names = list(S.binders(t))
    assert len(names) == len(set(names))


def test_annotations_parse():
    t = parse(r"letrec f [i : Nat -> Nat | i ^ 2/3, i+2 ^ 1/3] = \x : Nat[i+1]. 0")
    v = t.value
    assert v.annot.var == "i"
    assert [str(s) for s, _ in v.annot.calls] == ["i", "i+2"]
    assert str(v.body.annot) == "Nat[i+1]"


CORPUS_SOURCES = [
    r"(letrec f [i : Nat | i ^ 2/3, i+2 ^ 1/3] = \x. case x of { S -> \y. f y (+ 2/3) f (S S y) | 0 -> 0 }) 5",
    r"(letrec f [i : Nat | i+1 ^ 1/2] = \x. x (+ 1/2) S (f x)) 0",
    r"let x = 0 (+ 1/3) 2 in case x of { S -> \y. y | 0 -> 1 }",
    r"(\g : Nat -> Nat. g 0) (\z. S z)",
]


@pytest.mark.parametrize("src", CORPUS_SOURCES)
def test_print_parse_roundtrip(src):
    t = parse(src)
    assert parse(pretty(t)) == t


@settings(max_examples=300)
@given(nat_terms())
def test_roundtrip_random(t):
    t = S.freshen(t)
    assert alpha_equal(parse(pretty(t)), t)


@settings(max_examples=200)
@given(nat_terms(env=frozenset({"u"})), st.integers(0, 4))
def test_subst_commutes_with_renaming(t, n):
    # substituting into an alpha-renamed term gives an alpha-equivalent result
    v = encode_nat(n)
    out = subst_value(S.freshen(t), "u", v)
    assert alpha_equal(out, subst_value(t, "u", v))
    assert "u" not in free_vars(out)
