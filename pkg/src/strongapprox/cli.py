"""Command line: ``strongapprox pair-check | run | report``.

Exit codes: 0 every verdict passes, 2 some verdict fails, 1 configuration
or runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from . import harness


def _print_summary(summary, out=sys.stdout):
    for s in summary:
        verdicts = " ".join(f"{k}={s[k]}" for k in
                            ("corollary1_decay", "domination_bounded", "negative_control"))
        print(f"{s['pair_id']:>8} {s['fn_id']:>10} x={float(s['x']):+.6f} "
              f"{s['label']:<15} {verdicts}", file=out)


def cmd_pair_check(args):
    report = harness.pair_check(args.pair_id)
    if args.json:
        print(json.dumps({"pair_id": report.pair_id, "flags": report.flags,
                          "diagnostics": report.diagnostics}, indent=2, default=str))
    else:
        for k, v in report.flags.items():
            print(f"{k:32s} {v}")
        for k, v in report.diagnostics.items():
            print(f"{k:32s} {v}")
    return 0 if report.all_true else 2


def cmd_run(args):
    cfg = harness.load_config(args.config) if args.config else harness.ExperimentConfig()
    overrides = {}
    if args.pair:
        overrides["pairs"] = ",".join(args.pair)
    if args.fn:
        overrides["functions"] = ",".join(args.fn)
    if args.nmax is not None:
        overrides["nmax"] = str(args.nmax)
    if args.out:
        overrides["output"] = args.out
    harness.apply_settings(cfg, overrides)
    report = harness.run_sweep(cfg)
    rows_path, summary_path = harness.emit_csv(report, cfg.output_path)
    _print_summary(report.summary)
    print(f"wrote {rows_path} ({len(report.rows)} rows) and {summary_path}")
    return 0 if report.all_pass else 2


def cmd_report(args):
    rows = harness.read_rows(args.inp)
    tol = harness.read_tolerances(args.inp)
    summary = harness.summarize(rows, tol)
    _print_summary(summary)
    ok = all(v != "fail" for s in summary
             for v in (s["corollary1_decay"], s["domination_bounded"], s["negative_control"]))
    return 0 if ok else 2


def build_parser():
    p = argparse.ArgumentParser(prog="strongapprox", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("pair-check", help="check the hypotheses for an N-function pair")
    pc.add_argument("pair_id", help='"exp", "power:<alpha>" or "file:<path>"')
    pc.add_argument("--json", action="store_true")
    pc.set_defaults(func=cmd_pair_check)

    run = sub.add_parser("run", help="run a sweep and write CSV reports")
    run.add_argument("--config", help="flat key = value config file")
    run.add_argument("--pair", action="append", help="pair id (repeatable)")
    run.add_argument("--fn", action="append", help="function id (repeatable)")
    run.add_argument("--nmax", type=int, help="largest n of the default geometric grid")
    run.add_argument("--out", help="output CSV path")
    run.set_defaults(func=cmd_run)

    rep = sub.add_parser("report", help="re-derive verdicts from a sweep CSV")
    rep.add_argument("--in", dest="inp", required=True)
    rep.set_defaults(func=cmd_report)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (harness.ConfigError, KeyError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
