"""Seeded Monte-Carlo sweeps over schemes and system axes, persisted as CSV.

A sweep is (axis, values) x schemes x realizations.  Every cell of that
product is an independent work item whose randomness comes from keyed
counter-based streams, so results are identical whatever the execution
order or thread count.  Key layout per realization r at sweep value v:

* channels   (master, "chan", axis, v, r)   -- scheme never enters, so
  adding a scheme to the list cannot change other schemes' rows;
* aux draws  (master, "aux",  axis, v, kind, r)  -- pinned random
  phases, single-IRS channel rebuilds;
* init point (master, "init", axis, v, r)   -- shared by every scheme
  whose variable shapes match the full problem, which pairs the schemes
  on common random starts and shrinks the variance of mean differences;
  single-IRS schemes append their kind (their shapes differ).

The NMSE axis drops v from the chan/aux/init keys (the system is the
same at every error level) and scales one common error draw per
realization, so estimates degrade along a nested path as delta grows.

The CSV schema is versioned by a header comment line; wall_ms is
written as 0 so that byte-identical output is reproducible (the
in-memory rows keep the measured time).
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import baselines, channel, secrecy
from .baselines import SCHEME_KINDS, SchemeSpec
from .channel import CeeConfig, SceneGeometry
from .prgd import LineSearchError, OptimizerConfig
from .secrecy import SystemConfig

SWEEP_AXES = ("iterations", "m_tx", "n_elements", "nmse",
              "irs_positions", "n_sub")

CSV_HEADER = "# dirsec-results v1"
CSV_COLUMNS = ("scheme", "axis", "value", "realization", "seed",
               "ssr_bits", "iters", "grad_norm", "wall_ms")

_SINGLE_IRS = ("sbob_irs", "salice_irs")


@dataclass(frozen=True)
class ExperimentSpec:
    """One sweep: axis, points, schemes, realization count, and seeds."""

    sweep_axis: str
    axis_values: tuple
    schemes: tuple
    n_realizations: int
    system: SystemConfig
    geometry: SceneGeometry = SceneGeometry()
    optimizer: OptimizerConfig = OptimizerConfig()
    master_seed: int = 0
    output_path: str | None = None

    def __post_init__(self):
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis {self.sweep_axis!r}")
        object.__setattr__(self, "axis_values", tuple(self.axis_values))
        object.__setattr__(self, "schemes", tuple(
            s if isinstance(s, SchemeSpec) else SchemeSpec(s)
            for s in self.schemes))
        if not self.axis_values:
            raise ValueError("axis_values must be nonempty")
        if not self.schemes:
            raise ValueError("schemes must be nonempty")
        if self.n_realizations < 1:
            raise ValueError("n_realizations must be >= 1")


@dataclass
class ResultRow:
    """One solved (scheme, axis value, realization) cell."""

    scheme: str
    axis: str
    axis_value: float
    realization_index: int
    seed: int
    ssr_total_bits: float
    per_subcarrier_ssr: list
    iterations_used: int
    final_grad_norm: float
    wall_time_ms: float = 0.0

    def __post_init__(self):
        if not self.ssr_total_bits >= 0.0:
            raise ValueError("ssr_total_bits must be >= 0")

    def sort_key(self):
        return (self.scheme, self.axis_value, self.realization_index,
                self.iterations_used)

    def csv_fields(self) -> tuple:
        return (self.scheme, self.axis, _fmt_number(self.axis_value),
                str(self.realization_index), str(self.seed),
                _fmt_number(self.ssr_total_bits),
                str(self.iterations_used),
                _fmt_number(self.final_grad_norm),
                "0")  # pinned for byte-identical reruns


def _fmt_number(v) -> str:
    f = float(v)
    if f.is_integer() and abs(f) < 1e15:
        return str(int(f))
    return repr(f)


def _axis_system(spec: ExperimentSpec, value):
    """(SystemConfig, SceneGeometry, cee delta) at one sweep point."""
    cfg, geo, delta = spec.system, spec.geometry, 0.0
    axis = spec.sweep_axis
    if axis in ("iterations", "m_tx"):
        cfg = replace(cfg, m_tx=int(value))
    elif axis == "n_elements":
        cfg = replace(cfg, n_irs1=int(value), n_irs2=int(value))
    elif axis == "n_sub":
        cfg = replace(cfg, n_sub=int(value))
    elif axis == "irs_positions":
        x1, x2 = divmod(int(value), 100)
        geo = replace(geo, pos_irs1=(float(x1), geo.pos_irs1[1]),
                      pos_irs2=(float(x2), geo.pos_irs2[1]))
    elif axis == "nmse":
        delta = float(value)
    return cfg, geo, delta


def _value_key(axis: str, value) -> tuple:
    # the sweep value keys the random streams, except on the NMSE axis
    # where every delta must see the same channels and starts
    if axis == "nmse":
        return ()
    return (int(value),)


def _solve_cell(spec: ExperimentSpec, value, scheme: SchemeSpec,
                r: int) -> list:
    axis, master = spec.sweep_axis, spec.master_seed
    cfg, geo, delta = _axis_system(spec, value)
    keyv = _value_key(axis, value)

    ch = channel.generate(cfg, geo, channel.keyed_rng(
        master, "chan", axis, *keyv, r))
    aux_key = (master, "aux", axis, *keyv, scheme.kind, r)
    problem, eval_ch = baselines.restricted_problem(
        ch, cfg, scheme.kind, geo=geo,
        seed=channel.keyed_rng(*aux_key), n_sg=scheme.n_sg)

    if delta > 0.0:
        cee = CeeConfig(delta)
        if scheme.kind in _SINGLE_IRS:
            est = channel.inject_cee(eval_ch, cee, channel.keyed_rng(
                master, "cee", axis, scheme.kind, r))
        else:
            est_full = channel.inject_cee(ch, cee, channel.keyed_rng(
                master, "cee", axis, r))
            # reapply the scheme restriction (same aux stream, so pins
            # and zeroed families match the true-side problem exactly)
            _, est = baselines.restricted_problem(
                est_full, cfg, scheme.kind, geo=geo,
                seed=channel.keyed_rng(*aux_key), n_sg=scheme.n_sg)
        problem = replace(problem, channels=est)

    if scheme.kind in _SINGLE_IRS:
        init_key = (master, "init", axis, *keyv, scheme.kind, r)
    else:
        init_key = (master, "init", axis, *keyv, r)
    x0 = problem.random_point(channel.keyed_rng(*init_key))
    seed_id = int(channel.keyed_sequence(*init_key).entropy) % 2 ** 63

    t0 = time.perf_counter()
    try:
        res = baselines.solve_scheme(scheme, problem, x0, spec.optimizer)
    except LineSearchError as err:
        # a stalled line search is a recorded outcome, not a sweep abort
        res = err.partial_result
    wall_ms = 1000.0 * (time.perf_counter() - t0)

    final = res.final_point
    w_phys = math.sqrt(problem.cfg.power_watts) * final.w_blocks
    radiated = float(np.sum(np.abs(w_phys) ** 2))
    if abs(radiated - problem.cfg.power_watts) > 1e-9:
        raise RuntimeError(
            f"power accounting violated: {radiated!r} W radiated, "
            f"{problem.cfg.power_watts!r} W budgeted")
    per_k, total = secrecy.secrecy_rates(
        eval_ch, w_phys, final.phi1, final.phi2, problem.cfg)

    if axis == "iterations":
        rows = []
        ln2 = math.log(2.0)
        for t, obj in enumerate(res.objective_trace):
            gn = res.grad_norm_trace[min(t, len(res.grad_norm_trace) - 1)]
            rows.append(ResultRow(
                scheme=scheme.kind, axis=axis, axis_value=value,
                realization_index=r, seed=seed_id,
                ssr_total_bits=max(0.0, -obj / ln2),
                per_subcarrier_ssr=[], iterations_used=t,
                final_grad_norm=float(gn), wall_time_ms=wall_ms))
        return rows

    return [ResultRow(
        scheme=scheme.kind, axis=axis, axis_value=value,
        realization_index=r, seed=seed_id, ssr_total_bits=total,
        per_subcarrier_ssr=per_k, iterations_used=res.iterations_used,
        final_grad_norm=float(res.grad_norm_trace[-1]),
        wall_time_ms=wall_ms)]


def run(spec: ExperimentSpec, threads: int = 1, progress=None) -> list:
    """Execute the sweep; returns sorted rows and writes the CSV if asked.

    ``progress`` is an optional callable (done, total) invoked after
    each cell; it must only report, never influence results.
    """
    cells = [(value, scheme, r)
             for value in spec.axis_values
             for scheme in spec.schemes
             for r in range(spec.n_realizations)]
    rows = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            futures = [pool.submit(_solve_cell, spec, v, s, r)
                       for (v, s, r) in cells]
            for done, fut in enumerate(futures, start=1):
                rows.extend(fut.result())
                if progress is not None:
                    progress(done, len(cells))
    else:
        for done, (v, s, r) in enumerate(cells, start=1):
            rows.extend(_solve_cell(spec, v, s, r))
            if progress is not None:
                progress(done, len(cells))
    rows.sort(key=ResultRow.sort_key)
    if spec.output_path:
        write_csv(rows, spec.output_path)
    return rows


def write_csv(rows, path) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        fh.write(",".join(CSV_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(row.csv_fields()) + "\n")


def read_csv(path) -> list:
    """Rows back from a versioned results file (per-subcarrier data is
    not persisted, so it comes back empty)."""
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise ValueError(
                f"unrecognized results header {header!r}; "
                f"expected {CSV_HEADER!r}")
        names = fh.readline().rstrip("\n")
        if names != ",".join(CSV_COLUMNS):
            raise ValueError(f"unexpected column line {names!r}")
        rows = []
        for line in fh:
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(CSV_COLUMNS):
                raise ValueError(f"malformed row {line!r}")
            rows.append(ResultRow(
                scheme=parts[0], axis=parts[1], axis_value=float(parts[2]),
                realization_index=int(parts[3]), seed=int(parts[4]),
                ssr_total_bits=float(parts[5]), per_subcarrier_ssr=[],
                iterations_used=int(parts[6]),
                final_grad_norm=float(parts[7]),
                wall_time_ms=float(parts[8])))
    return rows


@dataclass(frozen=True)
class GroupSummary:
    scheme: str
    axis: str
    axis_value: float
    count: int
    mean: float
    std_error: float
    ci_low: float
    ci_high: float


def summarize(rows, *, resamples: int = 2000, seed: int = 0,
              expected=None) -> tuple:
    """Per-(scheme, axis value) mean, standard error, bootstrap 95% CI.

    Trace runs (iterations axis) are reduced to one scalar per
    realization (its last trace row) before aggregating.  Returns
    (summaries, warnings); groups listed in ``expected`` (pairs of
    scheme kind and axis value) but absent from the rows are skipped
    and reported in the warnings.
    """
    if rows and rows[0].axis == "iterations":
        finals = {}
        for row in rows:
            key = (row.scheme, row.axis_value, row.realization_index)
            if key not in finals or \
                    row.iterations_used > finals[key].iterations_used:
                finals[key] = row
        rows = sorted(finals.values(), key=ResultRow.sort_key)

    groups = {}
    for row in rows:
        groups.setdefault((row.scheme, row.axis_value), []).append(
            row.ssr_total_bits)

    warnings = []
    if expected is not None:
        for scheme, value in expected:
            if (scheme, float(value)) not in groups:
                warnings.append(
                    f"no rows for scheme={scheme} value={value}")

    rng = np.random.default_rng(seed)
    summaries = []
    for (scheme, value), vals in sorted(groups.items()):
        data = np.asarray(vals, dtype=float)
        n = data.size
        mean = float(data.mean())
        se = float(data.std(ddof=1) / np.sqrt(n)) if n > 1 else 0.0
        idx = rng.integers(0, n, size=(resamples, n))
        boot = data[idx].mean(axis=1)
        summaries.append(GroupSummary(
            scheme=scheme, axis=rows[0].axis if rows else "", axis_value=value,
            count=n, mean=mean, std_error=se,
            ci_low=float(np.quantile(boot, 0.025)),
            ci_high=float(np.quantile(boot, 0.975))))
    return summaries, warnings


# -- presets -----------------------------------------------------------

BENCH_SYSTEM = SystemConfig(
    m_tx=16, n_bob=2, n_eve=2, n_streams=2, n_sub=10,
    n_irs1=48, n_irs2=48, power_watts=1.0,
    noise_bob_watts=1e-11, noise_eve_watts=1e-11)

DESK_SYSTEM = replace(BENCH_SYSTEM, m_tx=8, n_sub=4, n_irs1=16, n_irs2=16)

ALL_SCHEMES = tuple(SchemeSpec(kind) for kind in SCHEME_KINDS)

# iteration budgets of the benchmark protocol: every scheme gets the
# same budget; the element sweep gets more head room for its largest
# instances (see the solver-comparison notes in the README)
SWEEP_BUDGET = OptimizerConfig(max_iters=260)
ELEMENT_SWEEP_BUDGET = OptimizerConfig(max_iters=300)
TRACE_BUDGET = OptimizerConfig(max_iters=500)

MASTER_SEED = 7

# IRS 1 scans the Alice side, IRS 2 the Eve-to-Bob side; the ranges are
# disjoint so no cell collocates the two surfaces (zero-distance link)
POSITION_GRID_X1 = (0, 5, 10, 15, 20)
POSITION_GRID_X2 = (40, 45, 50, 55, 60)


def preset(name: str, output_path: str | None = None) -> ExperimentSpec:
    """Named experiment definitions matching the shipped study plan."""
    common = dict(system=BENCH_SYSTEM, geometry=SceneGeometry(),
                  master_seed=MASTER_SEED, output_path=output_path)
    if name == "fig2":
        return ExperimentSpec(
            sweep_axis="iterations", axis_values=(4, 8, 16),
            schemes=(SchemeSpec("proposed"),), n_realizations=5,
            optimizer=TRACE_BUDGET, **common)
    if name == "fig3":
        return ExperimentSpec(
            sweep_axis="m_tx", axis_values=(4, 8, 12, 16),
            schemes=ALL_SCHEMES, n_realizations=100,
            optimizer=SWEEP_BUDGET, **common)
    if name == "fig4":
        return ExperimentSpec(
            sweep_axis="n_elements", axis_values=(16, 32, 48, 64),
            schemes=ALL_SCHEMES, n_realizations=100,
            optimizer=ELEMENT_SWEEP_BUDGET, **common)
    if name == "fig5":
        return ExperimentSpec(
            sweep_axis="nmse", axis_values=(0.0, 0.01, 0.05, 0.1),
            schemes=ALL_SCHEMES, n_realizations=100,
            optimizer=SWEEP_BUDGET, **common)
    if name == "fig6":
        values = tuple(100 * x1 + x2 for x1 in POSITION_GRID_X1
                       for x2 in POSITION_GRID_X2)
        return ExperimentSpec(
            sweep_axis="irs_positions", axis_values=values,
            schemes=(SchemeSpec("proposed"),), n_realizations=20,
            optimizer=SWEEP_BUDGET, **common)
    if name == "fig7":
        return ExperimentSpec(
            sweep_axis="n_sub", axis_values=(1, 6, 11, 16, 21),
            schemes=ALL_SCHEMES, n_realizations=50,
            optimizer=SWEEP_BUDGET, **common)
    if name == "desk":
        common["system"] = DESK_SYSTEM
        return ExperimentSpec(
            sweep_axis="m_tx", axis_values=(8,),
            schemes=ALL_SCHEMES, n_realizations=50,
            optimizer=TRACE_BUDGET, **common)
    raise ValueError(f"unknown preset {name!r}")


PRESET_NAMES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "desk")
