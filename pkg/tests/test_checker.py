import copy
import json
from fractions import Fraction as F

import pytest

from astcert import checker
from astcert import syntax as S
from astcert.certificates import derivation_from_json, derivation_to_json, load_trace
from astcert.checker import (
    BoundViolation, Derivation, ElaborationFailure, RuleViolation, TraceViolation, TypedEntry,
    WalkNotAST, check_derivation, check_nat_bound, check_reduction_trace, elaborate,
    expectation_type, interpret_size,
)
from astcert.sized import INF, ArrowS, DistType, NatS, Size
from astcert.syntax import parse, parse_dist_type
from conftest import CORPUS, corpus_program

CERTIFIED = ["mdbl", "mbias", "munb", "mexp"]
j = Size("j")


def nodes(d):
    yield d
    for p in d.premises:
        yield from nodes(p)


def letrec_node(d):
    return next(n for n in nodes(d) if n.rule == "LetRec")


@pytest.mark.parametrize("name", CERTIFIED)
def test_corpus_elaborates(name):
    d = elaborate(corpus_program(name))
    check_derivation(d)
    assert d.type == DistType.dirac(NatS(INF)) or all(isinstance(t, NatS) for t in d.type)
    assert not d.gamma and d.theta is None


def test_bias_body_judgement():
    body = letrec_node(elaborate(corpus_program("mbias"))).premises[0]
    assert body.theta == ("f", parse_dist_type("{Nat[i] -> Nat ^ 2/3, Nat[i+2] -> Nat ^ 1/3}"))
    assert body.type == parse_dist_type("Nat[i+1] -> Nat")
    check_derivation(body)


def test_double_body_judgement():
    rec = letrec_node(elaborate(corpus_program("mdbl")))
    body = rec.premises[0]
    assert body.theta == ("f", parse_dist_type("Nat[i] -> Nat"))
    assert body.type == parse_dist_type("Nat[i+1] -> Nat")
    assert [(str(s), p) for s, p in rec.data["calls"]] == [("i", 1)]


def test_geometric_walk_has_kill():
    from astcert.walk import from_distribution_type

    body = letrec_node(elaborate(corpus_program("mexp"))).premises[0]
    w = from_distribution_type(body.theta[1])
    assert w.increments == {1: F(1, 2)} and w.kill == F(1, 2)


UP_SRC = r"(letrec f [i : Nat | i ^ 1/3, i+2 ^ 2/3] = \x. case x of { S -> \y. f y (+ 1/3) f (S (S y)) | 0 -> 0 }) 1"


def test_elaboration_refuses_upward_walk():
    with pytest.raises(ElaborationFailure) as e:
        elaborate(parse(UP_SRC))
    assert e.value.rule == "LetRec" and "not AST" in e.value.message


def test_checker_rejects_upward_walk(monkeypatch):
    # build the derivation with the walk test switched off, then check it for real
    monkeypatch.setattr(checker, "is_ast", lambda w: True)
    d = elaborate(parse(UP_SRC))
    monkeypatch.undo()
    with pytest.raises(WalkNotAST) as e:
        check_derivation(d)
    assert e.value.rule == "LetRec"


def test_naff_elaboration_fails():
    src = r"(letrec f [i : Nat | i ^ 2/3, i+2 ^ 1/3] = \x. case x of { S -> \y. f y (+ 2/3) (f (S S y) ; f (S S y)) | 0 -> 0 }) 1"
    with pytest.raises(ElaborationFailure) as e:
        elaborate(parse(src))
    assert "AffinityViolation(f)" in str(e.value)


def test_small_examples():
    assert elaborate(parse("0")).type == DistType.dirac(NatS(INF))
    d = elaborate(parse("0 (+ 1/2) 0"), expected=parse_dist_type("{Nat[j+1] ^ 1/2, Nat[j+2] ^ 1/2}"))
    assert d.rule == "Choice"
    with pytest.raises(ElaborationFailure):
        elaborate(parse("1"), expected=parse_dist_type("Nat[j]"))
    d = elaborate(parse(r"\x : Nat[j+1]. S x"))
    assert d.type == parse_dist_type("Nat[j+1] -> Nat[j+2]")


def _mutants(d):
    """Derivations obtained by breaking one node of d."""
    arrow = DistType.dirac(ArrowS(NatS(INF), DistType.dirac(NatS(INF))))
    for k, n in enumerate(nodes(d)):
        m = copy.deepcopy(d)
        target = list(nodes(m))[k]
        target.type = arrow if isinstance(next(iter(n.type)), NatS) else DistType.dirac(NatS(INF))
        yield f"type@{k}", m
        m = copy.deepcopy(d)
        target = list(nodes(m))[k]
        target.rule = "Zero" if n.rule != "Zero" else "Succ"
        yield f"rule@{k}", m
        if n.premises:
            m = copy.deepcopy(d)
            list(nodes(m))[k].premises.pop()
            yield f"premise@{k}", m


@pytest.mark.parametrize("name", ["mbias", "mexp"])
def test_mutations_rejected(name):
    d = elaborate(corpus_program(name))
    count = 0
    for label, m in _mutants(d):
        with pytest.raises(RuleViolation):
            check_derivation(m)
        count += 1
    assert count > 30


def test_letrec_data_mutation_rejected():
    d = elaborate(corpus_program("mbias"))
    rec = letrec_node(d)
    rec.data["calls"] = [(Size("i"), F(1, 3)), (Size("i", 2), F(2, 3))]
    with pytest.raises(RuleViolation):
        check_derivation(d)


def test_rule_violation_record():
    bad = Derivation("Zero", {}, None, parse("1"), DistType.dirac(NatS(INF)))
    with pytest.raises(RuleViolation) as e:
        check_derivation(bad)
    rec = e.value.record()
    assert rec["rule"] == "Zero" and rec["error"] == "RuleViolation"


@pytest.mark.parametrize("name", CERTIFIED)
def test_elaborate_check_idempotent(name):
    t = corpus_program(name)
    d = elaborate(t)
    js = derivation_to_json(d)
    again = derivation_from_json(json.loads(json.dumps(js)))
    check_derivation(again)
    assert derivation_to_json(again) == js
    assert derivation_to_json(elaborate(t)) == js


def test_expectation_type_examples():
    a, b = parse_dist_type("Nat[j+1]"), parse_dist_type("Nat[j+2]")
    z = S.Val(S.Zero())
    assert expectation_type([(z, a, F(1, 2)), (z, b, F(1, 2))]) == parse_dist_type("{Nat[j+1] ^ 1/2, Nat[j+2] ^ 1/2}")
    assert expectation_type([(z, a, 1)]) == a


def _entry(src, ty, w):
    t = S.unwrap(parse(src))
    mu = parse_dist_type(ty)
    return TypedEntry(t, mu, F(w), elaborate(t, expected=mu))


def test_shipped_choice_trace():
    trace = load_trace(CORPUS / "traces" / "choice00.trace.json")
    check_reduction_trace(trace)
    second = trace[1]
    assert sorted(str(e.type) for e in second) == ["Nat[j+1]", "Nat[j+2]"]
    assert all(e.weight == F(1, 2) for e in second)


@pytest.mark.parametrize("name", ["choice01", "beta", "letchoice"])
def test_hand_built_traces(name):
    check_reduction_trace(load_trace(CORPUS / "traces" / f"{name}.trace.json"))


def test_value_trace():
    e = _entry("0", "Nat", 1)
    check_reduction_trace([[e], [e]])


def test_dropped_mass_trace():
    trace = load_trace(CORPUS / "traces" / "choice00.trace.json")
    trace[1] = trace[1][:1]
    with pytest.raises(TraceViolation) as e:
        check_reduction_trace(trace)
    assert (e.value.index, e.value.which) == (1, "b")


def test_trace_type_drift_rejected():
    first = _entry("0 (+ 1/2) 0", "{Nat[j+1] ^ 1/2, Nat[j+2] ^ 1/2}", 1)
    second = [_entry("0", "Nat[j+1]", F(1, 2)), _entry("0", "Nat[j+1]", F(1, 2))]
    with pytest.raises(TraceViolation) as e:
        check_reduction_trace([[first], second])
    assert (e.value.index, e.value.which) == (1, "c")


def test_trace_needs_derivation():
    e = TypedEntry(S.Zero(), parse_dist_type("Nat"), F(1), None)
    with pytest.raises(TraceViolation) as err:
        check_reduction_trace([[e]])
    assert err.value.which == "a"


def test_nat_bounds():
    ok = parse_dist_type("Nat[j+1]")
    check_nat_bound(parse("0"), ok, 0, {"j": 0})
    with pytest.raises(BoundViolation):
        check_nat_bound(parse("1"), ok, 0, {"j": 0})
    check_nat_bound(corpus_program("mexp"), parse_dist_type("Nat"), 100)
    assert interpret_size(Size("j", 2), {"j": 3}) == 5 and interpret_size(INF) is None


def test_nat_bound_split():
    mu = parse_dist_type("{Nat[j+1] ^ 1/2, Nat[j+2] ^ 1/2}")
    check_nat_bound(parse("0 (+ 1/2) 1"), mu, 1)
    with pytest.raises(BoundViolation):
        check_nat_bound(parse("1 (+ 2/3) 0"), mu, 1)
