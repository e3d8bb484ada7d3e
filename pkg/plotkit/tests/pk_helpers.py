"""Shared helpers for the plotkit tests: dirsec CLI plumbing."""

import json
import subprocess

ALL_SCHEMES = ("proposed", "aom_irs", "gd_irs", "dd_irs",
               "sbob_irs", "salice_irs", "r_irs")

TINY_SYSTEM = {"m_tx": 4, "n_irs1": 6, "n_irs2": 5, "n_sub": 2}


def run_cli(*argv, cwd=None):
    proc = subprocess.run(argv, capture_output=True, text=True, cwd=cwd)
    assert proc.returncode == 0, proc.stderr
    return proc.stdout


def dirsec_run(tmp, name, **spec_fields):
    spec = {"master_seed": 11, "system": TINY_SYSTEM,
            "optimizer": {"max_iters": 6},
            "output_path": str(tmp / name), **spec_fields}
    spec_path = tmp / f"{name}.spec.json"
    spec_path.write_text(json.dumps(spec))
    run_cli("dirsec", "run", "--spec", str(spec_path))
    return tmp / name
