"""Table of the least horizon n with Pr_n^(m) >= 1 - eps for a set of walks.

    python3 scripts/walk_horizons.py
    python3 scripts/walk_horizons.py --walk "walk{0:1/8, 1:3/4, 2:1/8}" --n-max 20000
"""
import argparse
from fractions import Fraction

from astcert.walk import first_horizon, horizon_bounds, is_ast, parse_walk

DEFAULT = {
    "mdbl": "walk{0:1}",
    "mbias": "walk{0:2/3, 2:1/3}",
    "munb": "walk{0:1/2, 2:1/2}",
    "mexp": "walk{1:1/2}",
}


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--walk", action="append", help="walk literal; may repeat (default: the corpus walks)")
    ap.add_argument("--n-max", type=int, default=100_000)
    ap.add_argument("--starts", type=int, nargs="+", default=[1, 5])
    ap.add_argument("--eps", type=Fraction, nargs="+", default=[Fraction(1, 10), Fraction(1, 100), Fraction(1, 1000)])
    args = ap.parse_args()
    walks = {w: w for w in args.walk} if args.walk else DEFAULT
    print(f"{'walk':24} {'AST':5} {'m':>3} " + " ".join(f"{'eps=' + str(e):>11}" for e in args.eps) + f"  Pr_{args.n_max} in")
    for name, lit in walks.items():
        w = parse_walk(lit)
        for m in args.starts:
            b = horizon_bounds(w, args.n_max, m)
            cells = []
            for eps in args.eps:
                n = first_horizon(w, m, eps, args.n_max, b)
                cells.append(f"{'-' if n is None else n:>11}")
            enclosure = f"[{b.lo[-1]:.6f}, {b.hi[-1]:.6f}]"
            print(f"{name:24} {str(is_ast(w)):5} {m:>3} " + " ".join(cells) + f"  {enclosure}")


if __name__ == "__main__":
    main()
