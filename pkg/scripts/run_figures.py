#!/usr/bin/env python3
"""Run the benchmark study plan end to end and summarize each sweep.

Every preset writes its CSV under --results-dir and prints the
aggregated table.  The full plan is compute-heavy (hours on one core);
use --only to reproduce a single sweep, e.g.

    python3 scripts/run_figures.py --only fig2 desk
"""

import argparse
import pathlib
import sys
import time

from dirsec import harness


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--results-dir", default="results")
    parser.add_argument("--only", nargs="*", choices=harness.PRESET_NAMES,
                        help="subset of presets (default: all)")
    parser.add_argument("--threads", type=int, default=1)
    args = parser.parse_args()

    out_dir = pathlib.Path(args.results_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = args.only or harness.PRESET_NAMES

    for name in names:
        path = out_dir / f"{name}.csv"
        spec = harness.preset(name, str(path))
        cells = (len(spec.axis_values) * len(spec.schemes)
                 * spec.n_realizations)
        print(f"== {name}: {cells} cells -> {path}", flush=True)
        t0 = time.time()
        rows = harness.run(spec, threads=args.threads,
                           progress=lambda d, t: print(
                               f"  {d}/{t}", end="\r", flush=True)
                           if d % 20 == 0 or d == t else None)
        print(f"  {len(rows)} rows in {time.time() - t0:.0f}s")
        summaries, warnings = harness.summarize(rows)
        for s in summaries:
            print(f"  {s.scheme:<12s} value={s.axis_value:<8g} "
                  f"mean={s.mean:.4f} ci=[{s.ci_low:.4f}, {s.ci_high:.4f}]")
        for w in warnings:
            print(f"  warning: {w}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
