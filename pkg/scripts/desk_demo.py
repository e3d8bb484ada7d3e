#!/usr/bin/env python3
"""Small-scale end-to-end demo: all seven schemes on the desk system.

Runs in a couple of minutes on one core and prints the scheme ordering
with bootstrap intervals; a quick way to see the pipeline work before
committing to the benchmark-scale sweeps.
"""

import argparse
import sys
from dataclasses import replace

from dirsec import harness


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--realizations", type=int, default=10)
    parser.add_argument("--out", default=None, help="optional CSV path")
    args = parser.parse_args()

    spec = replace(harness.preset("desk"), n_realizations=args.realizations,
                   output_path=args.out)
    rows = harness.run(spec)
    summaries, _ = harness.summarize(rows)
    for s in sorted(summaries, key=lambda g: -g.mean):
        print(f"{s.scheme:<12s} mean={s.mean:.4f} "
              f"ci=[{s.ci_low:.4f}, {s.ci_high:.4f}] n={s.count}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
