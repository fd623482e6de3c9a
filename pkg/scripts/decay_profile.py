"""Follow H_n and the three right-hand sides along n = 2^m - 1 past the
acceptance grid, with ratios to the n = 3 value and local log-log slopes.

Example:  python scripts/decay_profile.py --fn cos3 --x 0 --mmax 14
"""

import argparse
import math

import numpy as np

from strongapprox.fourier import get_function
from strongapprox.harness import parse_x
from strongapprox.nfunction import get_pair
from strongapprox.strongmeans import WEIGHTS, psi_prefix, strong_means, theorem_rhs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--pair", default="exp")
    ap.add_argument("--fn", default="cos3")
    ap.add_argument("--x", default="0")
    ap.add_argument("--mmax", type=int, default=13)
    ap.add_argument("--factor", type=float, default=0.2)
    args = ap.parse_args()

    pair, f, x = get_pair(args.pair), get_function(args.fn), parse_x(args.x)
    ns = [2 ** m - 1 for m in range(2, args.mmax + 1)]
    h = strong_means(pair, f, x, ns)
    rhs = {v: [] for v in WEIGHTS}
    for n in ns:
        prefix = psi_prefix(pair, f, x, n)
        for v in WEIGHTS:
            rhs[v].append(theorem_rhs(pair, f, x, n, v, prefix=prefix))

    print(f"# {args.pair} {args.fn} x={x:.6g}; ratios to n=3, slope = dlog/dlog(n+1)")
    print(f"{'n':>6} {'H':>11} {'H/H3':>7} {'slope':>6} " +
          " ".join(f"{'rhs_' + v:>13} {'ratio':>7}" for v in WEIGHTS))
    for i, n in enumerate(ns):
        slope = "" if i == 0 else (
            f"{math.log(h[i] / h[i - 1]) / math.log((n + 1) / (ns[i - 1] + 1)):6.3f}"
            if h[i] > 0 and h[i - 1] > 0 else "")
        cols = " ".join(f"{rhs[v][i]:13.6e} {rhs[v][i] / rhs[v][0]:7.3f}"
                        if rhs[v][0] > 0 else f"{rhs[v][i]:13.6e} {'':>7}" for v in WEIGHTS)
        ratio = h[i] / h[0] if h[0] > 0 else float("nan")
        print(f"{n:6d} {h[i]:11.4e} {ratio:7.3f} {slope:>6} {cols}")
    for name, vals in [("H", list(h))] + [(f"rhs_{v}", rhs[v]) for v in WEIGHTS]:
        vals = np.asarray(vals)
        hit = [n for i, n in enumerate(ns) if i >= 2 and vals[i - 2:i + 1].max() < args.factor * vals[0]]
        print(f"# {name}: first n whose last-three max is below {args.factor} x value(3): "
              f"{hit[0] if hit else 'not reached'}")


if __name__ == "__main__":
    main()
