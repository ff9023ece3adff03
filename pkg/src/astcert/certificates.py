"""JSON (de)serialisation of derivations and reduction traces."""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

from . import syntax as S
from .checker import Derivation, TypedEntry
from .distributions import fmt_rational
from .sized import DistType

SCHEMA = "astcert/1"
TRACE_SCHEMA = "astcert-trace/1"


class CertificateError(ValueError):
    pass


def _parse_subject(text: str):
    # no binder renaming: subjects are printed subterms of an already
    # freshened program and must be read back verbatim
    return S.unwrap(S.Parser(text).parse_program())


def _data_to_json(rule: str, data: dict) -> dict:
    if rule == "LetRec":
        return {
            "size_var": data["size_var"],
            "nu": str(data["nu"]),
            "calls": [[str(s), fmt_rational(p)] for s, p in data["calls"]],
            "r": str(data["r"]),
        }
    return {}


def _data_from_json(rule: str, data: dict) -> dict:
    if rule == "LetRec":
        try:
            return {
                "size_var": data["size_var"],
                "nu": S.parse_dist_type(data["nu"]),
                "calls": [(S.parse_size(s), Fraction(p)) for s, p in data["calls"]],
                "r": S.parse_size(data["r"]),
            }
        except (KeyError, TypeError, ValueError) as e:
            raise CertificateError(f"bad LetRec data: {e}") from e
    return {}


def derivation_to_json(d: Derivation) -> dict:
    return {
        "rule": d.rule,
        "gamma": {x: str(t) for x, t in d.gamma.items()},
        "theta": None if d.theta is None else {"var": d.theta[0], "type": str(d.theta[1])},
        "subject": S.pretty(d.subject),
        "type": str(d.type),
        "data": _data_to_json(d.rule, d.data),
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def derivation_from_json(obj: dict) -> Derivation:
    try:
        rule = obj["rule"]
        gamma = {x: S.parse_type(t) for x, t in obj["gamma"].items()}
        th = obj.get("theta")
        theta = None if th is None else (th["var"], S.parse_dist_type(th["type"]))
        subject = _parse_subject(obj["subject"])
        ty = S.parse_dist_type(obj["type"])
        data = _data_from_json(rule, obj.get("data") or {})
        premises = [derivation_from_json(p) for p in obj.get("premises", [])]
    except (KeyError, TypeError, S.ParseError) as e:
        raise CertificateError(f"malformed certificate node: {e}") from e
    return Derivation(rule, gamma, theta, subject, ty, premises, data)


def certificate_to_json(d: Derivation, program) -> dict:
    return {
        "schema": SCHEMA,
        "program": S.pretty(program),
        "derivation": derivation_to_json(d),
    }


def load_certificate(path) -> tuple:
    """Return (program term, derivation)."""
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise CertificateError(f"{path}: not JSON: {e}") from e
    if obj.get("schema") != SCHEMA:
        raise CertificateError(f"{path}: unknown schema {obj.get('schema')!r}")
    d = derivation_from_json(obj["derivation"])
    return _parse_subject(obj["program"]), d


def save_certificate(path, d: Derivation, program) -> None:
    Path(path).write_text(json.dumps(certificate_to_json(d, program), indent=1, ensure_ascii=False) + "\n")


def trace_to_json(trace) -> dict:
    return {
        "schema": TRACE_SCHEMA,
        "steps": [
            [
                {
                    "term": S.pretty(e.term),
                    "type": str(e.type),
                    "weight": fmt_rational(e.weight),
                    "derivation": None if e.derivation is None else derivation_to_json(e.derivation),
                }
                for e in elem
            ]
            for elem in trace
        ],
    }


def trace_from_json(obj: dict) -> list:
    if obj.get("schema") != TRACE_SCHEMA:
        raise CertificateError(f"unknown trace schema {obj.get('schema')!r}")
    out = []
    for elem in obj["steps"]:
        row = []
        for e in elem:
            der = e.get("derivation")
            row.append(
                TypedEntry(
                    _parse_subject(e["term"]),
                    S.parse_dist_type(e["type"]),
                    Fraction(e["weight"]),
                    None if der is None else derivation_from_json(der),
                )
            )
        out.append(row)
    return out


def load_trace(path) -> list:
    return trace_from_json(json.loads(Path(path).read_text()))


def save_trace(path, trace) -> None:
    Path(path).write_text(json.dumps(trace_to_json(trace), indent=1, ensure_ascii=False) + "\n")


def typed_entry(term, ty: DistType, weight) -> TypedEntry:
    """Build a trace entry, elaborating its closed derivation."""
    from .checker import elaborate

    term = S.unwrap(term)
    return TypedEntry(term, ty, Fraction(weight), elaborate(term, expected=ty))
