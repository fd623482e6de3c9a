"""Tabulate the hypothesis flags and diagnostics for several pairs."""

import argparse

from strongapprox.harness import pair_check


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("pairs", nargs="*", default=["exp", "power:1.5", "power:2", "power:3", "power:4"])
    args = ap.parse_args()
    reports = [pair_check(p) for p in args.pairs]
    keys = list(reports[0].flags) + ["young_worst_gap", "young_equality_rel_gap",
                                     "conjugate_max_rel_err", "lemma1_C", "series_tail_slope"]
    print(f"{'':32s}" + "".join(f"{r.pair_id:>12s}" for r in reports))
    for k in keys:
        cells = []
        for r in reports:
            v = r.flags.get(k, r.diagnostics.get(k))
            cells.append(f"{v!s:>12s}" if isinstance(v, bool) else f"{v:12.4g}")
        print(f"{k:32s}" + "".join(cells))


if __name__ == "__main__":
    main()
