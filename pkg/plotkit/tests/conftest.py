"""Fixtures: small results CSVs produced through the dirsec CLI.

plotkit consumes the optimizer package only through its external
interfaces, so every fixture here shells out to ``dirsec run`` or
``dirsec selftest`` rather than importing dirsec.  The whole directory
skips when either console script is absent.
"""

import shutil

import pytest

pytest.importorskip("plotkit")

if shutil.which("dirsec") is None or shutil.which("plotkit") is None:
    pytest.skip("dirsec/plotkit console scripts not installed",
                allow_module_level=True)

from pk_helpers import ALL_SCHEMES, dirsec_run, run_cli  # noqa: E402


@pytest.fixture(scope="session")
def work(tmp_path_factory):
    return tmp_path_factory.mktemp("plotkit")


@pytest.fixture(scope="session")
def sweep_csv(work):
    """Two-point antenna sweep over all seven schemes, two realizations."""
    return dirsec_run(work, "sweep.csv", sweep_axis="m_tx",
                      axis_values=[4, 6], schemes=list(ALL_SCHEMES),
                      n_realizations=2)


@pytest.fixture(scope="session")
def trace_csv(work):
    """Full iteration traces at two antenna counts, two realizations."""
    return dirsec_run(work, "trace.csv", sweep_axis="iterations",
                      axis_values=[4, 6], schemes=["proposed"],
                      n_realizations=2, optimizer={"max_iters": 8})


@pytest.fixture(scope="session")
def heat_csv(work):
    """Three placement cells out of a 2x2 grid (one cell missing)."""
    return dirsec_run(work, "heat.csv", sweep_axis="irs_positions",
                      axis_values=[540, 560, 2040], schemes=["proposed"],
                      n_realizations=2)


@pytest.fixture(scope="session")
def golden_csv(work):
    """The harness selftest fixture: 12 rows over a two-point sweep."""
    out = work / "golden.csv"
    run_cli("dirsec", "selftest", "--out", str(out))
    return out
