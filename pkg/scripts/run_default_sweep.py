"""Run the default sweep, write the CSV pair and print the verdict table."""

import argparse
import sys
import time
from pathlib import Path

from strongapprox import cli

HERE = Path(__file__).resolve().parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--config", default=str(HERE / "default.cfg"))
    ap.add_argument("--out", default=None)
    args = ap.parse_args()
    argv = ["run", "--config", args.config] + (["--out", args.out] if args.out else [])
    t0 = time.perf_counter()
    code = cli.main(argv)
    print(f"elapsed {time.perf_counter() - t0:.1f}s, exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
