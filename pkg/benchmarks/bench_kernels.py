"""Compiled vs pure-Python kernel timings.

    python3 benchmarks/bench_kernels.py [--trials 2000] [--json out.json]
"""

import argparse
import json

from s3stream.cli import format_table
from s3stream.kernels.compare import compare_backends


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--json", help="write rows as JSON to this path")
    args = p.parse_args()
    rows = compare_backends(args.trials)
    print(format_table(rows))
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
