"""Regenerate the corpus certificates and the typed reduction traces."""
import argparse
from pathlib import Path

from astcert import syntax as S
from astcert.certificates import save_certificate, save_trace, typed_entry
from astcert.checker import ElaborationFailure, check_reduction_trace, elaborate
from astcert.semantics import step_dist
from astcert.distributions import Distribution

ROOT = Path(__file__).resolve().parent.parent / "corpus"
CERTIFIED = ["mdbl", "mbias", "munb", "mexp"]

# (name, source, expected type, number of reduction steps to record)
TRACES = [
    ("choice00", "0 (+ 1/2) 0", "{Nat[j+1] ^ 1/2, Nat[j+2] ^ 1/2}", 2),
    ("choice01", "0 (+ 1/3) 1", "{Nat[j+1] ^ 1/3, Nat[j+2] ^ 2/3}", 1),
    ("beta", "(\\x : Nat[j+1]. S x) 0", "Nat[j+2]", 1),
    ("letchoice", "let x = 0 (+ 1/2) 1 in S x", "Nat", 2),
]


def typed_step(entries):
    """Step each typed entry.  A choice splits its type along the arms;
    any other redex passes its type on to every reduct."""
    out = []
    for e in entries:
        term = S.as_term(e.term)
        if isinstance(term, S.Val):
            out.append(typed_entry(term, e.type, e.weight))
        elif isinstance(term, S.Choice):
            (lt, p), (rt, q) = _arm_types(term, e.type)
            out.append(typed_entry(term.left, lt, e.weight * p))
            out.append(typed_entry(term.right, rt, e.weight * q))
        else:
            for t, p in step_dist(Distribution.dirac(term)).items():
                out.append(typed_entry(t, e.type, e.weight * p))
    return out


def _arm_types(term, mu):
    d = elaborate(term, expected=mu)
    while d.rule == "Sub":
        d = d.premises[0]
    left, right = d.premises
    return [(left.type, term.prob), (right.type, 1 - term.prob)]


def build_trace(src, ty, steps):
    term = S.parse(src)
    mu = S.parse_dist_type(ty)
    trace = [[typed_entry(term, mu, 1)]]
    for _ in range(steps):
        trace.append(typed_step(trace[-1]))
    check_reduction_trace(trace)
    return trace


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--root", type=Path, default=ROOT)
    args = ap.parse_args()
    for name in CERTIFIED:
        prog = S.parse((args.root / f"{name}.lop").read_text())
        try:
            d = elaborate(prog)
        except ElaborationFailure as e:
            raise SystemExit(f"{name}: {e}")
        save_certificate(args.root / f"{name}.cert.json", d, prog)
        print(f"{name}: {d.size()} rule instances")
    tdir = args.root / "traces"
    tdir.mkdir(exist_ok=True)
    for name, src, ty, steps in TRACES:
        save_trace(tdir / f"{name}.trace.json", build_trace(src, ty, steps))
        print(f"trace {name}: {steps + 1} elements")


if __name__ == "__main__":
    main()
