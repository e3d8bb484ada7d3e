"""Render images for every results CSV in a directory.

Companion to run_figures.py: point it at the directory of preset CSVs
and it emits one plot spec JSON plus one PNG per file, shelling out to
the plotkit CLI (the same interface a user would drive by hand).

    python3 scripts/render_figures.py --results-dir results
"""

import argparse
import json
import subprocess
import sys
from pathlib import Path

FIGURE_KIND = {
    "iterations": "convergence",
    "m_tx": "line_sweep",
    "n_elements": "line_sweep",
    "n_sub": "line_sweep",
    "nmse": "line_sweep",
    "irs_positions": "heatmap",
}

DISPLAY_NAMES = {
    "proposed": "Proposed (coupled surfaces)",
    "aom_irs": "Alternating optimization",
    "gd_irs": "Fixed-step gradient",
    "dd_irs": "Uncoupled double IRS",
    "sbob_irs": "Single IRS near Bob",
    "salice_irs": "Single IRS near Alice",
    "r_irs": "Random phases",
}


def csv_axis_and_schemes(path: Path):
    axis, schemes = "", set()
    with open(path) as fh:
        fh.readline()
        fh.readline()
        for line in fh:
            row = line.split(",")
            if len(row) > 1:
                schemes.add(row[0])
                axis = row[1]
    return axis, schemes


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--results-dir", default="results")
    args = parser.parse_args()
    results = Path(args.results_dir)
    csvs = sorted(results.glob("*.csv"))
    if not csvs:
        print(f"no CSVs under {results}/ (run scripts/run_figures.py first)")
        return 1
    failures = 0
    for path in csvs:
        axis, schemes = csv_axis_and_schemes(path)
        kind = FIGURE_KIND.get(axis)
        if kind is None:
            print(f"{path.name}: skipped (unrecognized axis {axis!r})")
            continue
        labels = {k: v for k, v in DISPLAY_NAMES.items() if k in schemes}
        spec = {
            "figure_kind": kind,
            "input_csv": str(path),
            "output_image": str(path.with_suffix(".png")),
            "scheme_labels": labels if kind == "line_sweep" else {},
        }
        spec_path = path.with_suffix(".plot.json")
        spec_path.write_text(json.dumps(spec, indent=1))
        proc = subprocess.run(["plotkit", "--spec", str(spec_path)],
                              capture_output=True, text=True)
        if proc.returncode == 0:
            print(f"{path.name}: {proc.stdout.strip()}")
        else:
            failures += 1
            print(f"{path.name}: FAILED\n{proc.stderr.strip()}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
