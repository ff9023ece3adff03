"""Command-line front end.

Exit codes: 0 accepted, 1 rejected, 2 usage, input or parse error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import syntax as S
from .certificates import CertificateError, load_certificate, load_trace, save_certificate
from .checker import (
    ElaborationFailure,
    RuleViolation,
    TraceViolation,
    check_derivation,
    check_reduction_trace,
    elaborate,
)
from .distributions import fmt_rational
from .semantics import StuckTerm, eval_n, sample_many
from .simple_types import SimpleTypeError, check_simple
from .walk import finite_horizon_curve, is_ast, parse_walk

SCHEMA = "astcert-cli/1"
OK, REJECT, ERROR = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    steps: Optional[int] = None
    trials: Optional[int] = None
    seed: Optional[int] = None
    max_steps: Optional[int] = None
    horizon: Optional[int] = None
    start: int = 1
    ast: bool = False
    cert: Optional[str] = None
    write_cert: Optional[str] = None
    elaborate: bool = False
    format: str = "text"


def _emit(out, cfg: RunConfig, payload: dict, text: str) -> None:
    if cfg.format == "json":
        out.write(json.dumps({"schema": SCHEMA, **payload}, sort_keys=True, ensure_ascii=False) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _read_program(path: str):
    try:
        src = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e
    try:
        return S.parse(src)
    except S.ParseError as e:
        raise UsageError(f"{path}:{e}") from e


def cmd_check(cfg: RunConfig, out) -> int:
    t = _read_program(cfg.input)
    try:
        ty = check_simple({}, t)
    except SimpleTypeError as e:
        _emit(out, cfg, {"command": "check", "status": "rejected", **e.record()}, f"rejected: {e}")
        return REJECT
    _emit(out, cfg, {"command": "check", "status": "ok", "type": str(ty)}, f"ok: {ty}")
    return OK


def cmd_certify(cfg: RunConfig, out) -> int:
    t = _read_program(cfg.input)
    try:
        check_simple({}, t)
        if cfg.cert:
            try:
                prog, d = load_certificate(cfg.cert)
            except (OSError, CertificateError, S.ParseError) as e:
                raise UsageError(f"cannot load certificate: {e}") from e
            if not S.alpha_equal(prog, t):
                raise RuleViolation("root", d.rule, "certificate is for a different program")
            if d.gamma or d.theta is not None or not S.alpha_equal(d.subject, S.unwrap(t)):
                raise RuleViolation("root", d.rule, "certificate must conclude ∅ | ∅ ⊢ program")
            if d.subject != S.unwrap(t):
                t = d.subject
            check_derivation(d)
        else:
            d = elaborate(t)
            if cfg.write_cert:
                save_certificate(cfg.write_cert, d, t)
    except (SimpleTypeError, RuleViolation, ElaborationFailure) as e:
        _emit(out, cfg, {"command": "certify", "status": "rejected", **e.record()}, f"rejected: {e}")
        return REJECT
    payload = {"command": "certify", "status": "certified", "type": str(d.type), "nodes": d.size()}
    _emit(out, cfg, payload, f"AST certified: ⊢ {S.pretty(t)} : {d.type} ({d.size()} rule instances)")
    return OK


def cmd_eval(cfg: RunConfig, out) -> int:
    if cfg.steps is None or cfg.steps < 0:
        raise UsageError("eval needs --steps N with N >= 0")
    t = _read_program(cfg.input)
    try:
        rep = eval_n(t, cfg.steps)
    except StuckTerm as e:
        _emit(out, cfg, {"command": "eval", "status": "stuck", "term": S.pretty(e.term)}, f"stuck: {e}")
        return REJECT
    rows = sorted(rep.value_mass.items(), key=lambda kv: (S.decode_nat(kv[0]) is None, S.decode_nat(kv[0]) or 0, S.pretty(kv[0])))
    payload = {
        "command": "eval",
        "steps": rep.steps,
        "values": [{"value": S.pretty(v), "mass": fmt_rational(p)} for v, p in rows],
        "residual": fmt_rational(rep.residual_mass),
        "termination_lower_bound": fmt_rational(rep.termination_lower_bound),
    }
    lines = [f"steps: {rep.steps}"]
    lines += [f"  {S.pretty(v)} ↦ {fmt_rational(p)}" for v, p in rows]
    lines.append(f"termination lower bound: {fmt_rational(rep.termination_lower_bound)}")
    lines.append(f"residual: {fmt_rational(rep.residual_mass)}")
    _emit(out, cfg, payload, "\n".join(lines))
    return OK


def cmd_sample(cfg: RunConfig, out) -> int:
    if cfg.trials is None or cfg.trials <= 0:
        raise UsageError("sample needs --trials T with T > 0")
    if cfg.seed is None:
        if cfg.format == "json":
            raise UsageError("sample in json mode needs an explicit --seed")
        cfg.seed = 0
    max_steps = cfg.max_steps if cfg.max_steps is not None else 10_000
    t = _read_program(cfg.input)
    try:
        rep = sample_many(t, cfg.trials, cfg.seed, max_steps)
    except StuckTerm as e:
        _emit(out, cfg, {"command": "sample", "status": "stuck", "term": S.pretty(e.term)}, f"stuck: {e}")
        return REJECT
    rows = sorted(rep.counts.items(), key=lambda kv: (S.decode_nat(kv[0]) is None, S.decode_nat(kv[0]) or 0, S.pretty(kv[0])))
    payload = {
        "command": "sample",
        "trials": rep.trials,
        "seed": rep.seed,
        "max_steps": max_steps,
        "counts": [{"value": S.pretty(v), "count": c, "frequency": round(c / rep.trials, 6)} for v, c in rows],
        "timeouts": rep.timeouts,
        "terminated_fraction": round(rep.terminated / rep.trials, 6),
    }
    lines = [f"trials: {rep.trials} (seed {rep.seed}, max steps {max_steps})"]
    lines += [f"  {S.pretty(v)}: {c} ({c / rep.trials:.4f})" for v, c in rows]
    lines.append(f"timeouts: {rep.timeouts}")
    lines.append(f"terminated: {rep.terminated / rep.trials:.4f}")
    _emit(out, cfg, payload, "\n".join(lines))
    return OK


def cmd_walk(cfg: RunConfig, out) -> int:
    try:
        w = parse_walk(cfg.input)
    except ValueError as e:
        raise UsageError(str(e)) from e
    if cfg.start < 0:
        raise UsageError("--from must be non-negative")
    decision = is_ast(w)
    table = []
    if cfg.horizon is not None:
        if cfg.horizon < 0:
            raise UsageError("--horizon must be non-negative")
        table = finite_horizon_curve(w, cfg.horizon, cfg.start)
    if cfg.format == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["n", "m", "probability"])
        for n, p in enumerate(table):
            wr.writerow([n, cfg.start, fmt_rational(p)])
        out.write(f"# {w} ast={str(decision).lower()} kill={fmt_rational(w.kill)} drift={fmt_rational(w.drift)}\n")
        out.write(buf.getvalue())
    else:
        payload = {
            "command": "walk",
            "walk": {str(k): fmt_rational(p) for k, p in w.increments.items()},
            "ast": decision,
            "kill": fmt_rational(w.kill),
            "drift": fmt_rational(w.drift),
        }
        if cfg.horizon is not None:
            payload["from"] = cfg.start
            payload["horizon"] = [fmt_rational(p) for p in table]
        text = f"AST: {str(decision).lower()}; kill={fmt_rational(w.kill)}; drift={fmt_rational(w.drift)}"
        if table:
            text += "\n" + "\n".join(f"Pr_{n}^({cfg.start}) = {fmt_rational(p)}" for n, p in enumerate(table))
        _emit(out, cfg, payload, text)
    return REJECT if cfg.ast and not decision else OK


def cmd_trace(cfg: RunConfig, out) -> int:
    try:
        trace = load_trace(cfg.input)
    except (OSError, ValueError, KeyError, S.ParseError) as e:
        raise UsageError(f"cannot load trace: {e}") from e
    try:
        check_reduction_trace(trace)
    except TraceViolation as e:
        _emit(out, cfg, {"command": "trace", "status": "rejected", "index": e.index, "condition": e.which, "detail": e.detail}, f"rejected: {e}")
        return REJECT
    _emit(out, cfg, {"command": "trace", "status": "ok", "length": len(trace)}, f"ok: {len(trace)} typed distributions")
    return OK


COMMANDS = {
    "check": cmd_check,
    "certify": cmd_certify,
    "eval": cmd_eval,
    "sample": cmd_sample,
    "walk": cmd_walk,
    "trace": cmd_trace,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="astcert", description="Certify almost-sure termination of probabilistic lambda-terms.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def fmt(sp, choices=("text", "json")):
        sp.add_argument("--format", choices=choices, default="text")

    sp = sub.add_parser("check", help="affine simple type check")
    sp.add_argument("input")
    fmt(sp)

    sp = sub.add_parser("certify", help="check a certificate or elaborate one")
    sp.add_argument("input")
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--cert", help="certificate JSON to validate")
    g.add_argument("--elaborate", action="store_true", help="build a derivation from inline annotations")
    sp.add_argument("--write-cert", help="with --elaborate, save the derivation here")
    fmt(sp)

    sp = sub.add_parser("eval", help="exact n-step evaluation")
    sp.add_argument("input")
    sp.add_argument("--steps", type=int, required=True)
    fmt(sp)

    sp = sub.add_parser("sample", help="Monte-Carlo runs")
    sp.add_argument("input")
    sp.add_argument("--trials", type=int, required=True)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--max-steps", type=int, default=10_000)
    fmt(sp)

    sp = sub.add_parser("walk", help="analyse a sized walk literal such as 'walk{0:2/3, 2:1/3}'")
    sp.add_argument("input", metavar="WALK")
    sp.add_argument("--ast", action="store_true", help="exit 1 when the walk is not AST")
    sp.add_argument("--horizon", type=int)
    sp.add_argument("--from", dest="start", type=int, default=1)
    fmt(sp, ("text", "json", "csv"))

    sp = sub.add_parser("trace", help="check a typed reduction trace")
    sp.add_argument("input")
    fmt(sp)
    return p


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        ns = build_parser().parse_args(argv)
        if ns.command is None:
            raise UsageError("missing command")
        cfg = RunConfig(**{k: v for k, v in vars(ns).items() if k in RunConfig.__dataclass_fields__})
        if cfg.write_cert and cfg.cert:
            raise UsageError("--write-cert cannot be combined with --cert")
        return COMMANDS[cfg.command](cfg, out)
    except UsageError as e:
        err.write(f"astcert: error: {e}\n")
        return ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
