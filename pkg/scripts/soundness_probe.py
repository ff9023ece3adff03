"""Exact termination curves and Monte-Carlo runs for the certified corpus.

Prints, per program, the first step count N at which the exact termination
lower bound reaches 1 - 2^-10 (within --steps), and the fraction of sampled
runs that reach a value.
"""
import argparse
from fractions import Fraction
from pathlib import Path

from astcert import syntax as S
from astcert.checker import elaborate
from astcert.semantics import sample_many, termination_curve

ROOT = Path(__file__).resolve().parent.parent / "corpus"


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("programs", nargs="*", default=["mdbl", "mbias", "munb", "mexp"])
    ap.add_argument("--steps", type=int, default=2000)
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--max-steps", type=int, default=10_000)
    args = ap.parse_args()
    target = 1 - Fraction(1, 2**10)
    for name in args.programs:
        t = S.parse((ROOT / f"{name}.lop").read_text())
        elaborate(t)  # only certified programs are probed
        curve = termination_curve(t, args.steps)
        hit = next((n for n, p in enumerate(curve) if p >= target), None)
        rep = sample_many(t, args.trials, args.seed, args.max_steps)
        print(
            f"{name:6} N(1-2^-10)={'>' + str(args.steps) if hit is None else hit:>8}  "
            f"bound@{args.steps}={float(curve[-1]):.6f}  "
            f"sampled {rep.terminated}/{rep.trials} terminated"
        )


if __name__ == "__main__":
    main()
