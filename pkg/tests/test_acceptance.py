"""Benchmark acceptance gate.

Re-runs the frozen benchmark protocol (master seed 7, the shipped
iteration budgets and scheme knobs) at full scale and asserts the
numeric targets. One line per criterion is printed:

    ACCEPTANCE <criterion>: PASS|FAIL (details)

Heavy sweeps are module-scoped fixtures shared across criteria; the
whole module takes roughly 20 minutes on one core.

Four targets are known to be missed by this implementation and their
tests are expected to fail; each docstring states the measured value
and the cause. They are asserted at the stated targets anyway: the
gate reports the truth rather than encoding the implementation's
behavior.
"""

import time

import numpy as np
import pytest

from dirsec import harness, prgd
from dirsec.baselines import SchemeSpec
from dirsec.channel import SceneGeometry, generate, keyed_rng
from dirsec.harness import (ALL_SCHEMES, DESK_SYSTEM, ELEMENT_SWEEP_BUDGET,
                            MASTER_SEED, BENCH_SYSTEM, SWEEP_BUDGET,
                            TRACE_BUDGET, ExperimentSpec, preset)
from dirsec.manifold import IteratePoint
from dirsec.prgd import Problem
from dirsec.secrecy import SystemConfig, euclidean_gradient, objective

TOL = 0.15  # half-width of every mean-SSR target band

TARGET_MEAN_M16 = 4.45       # bits/s/Hz at M=16, N=48
TARGET_MEAN_N64 = 6.46       # bits/s/Hz at M=16, N=64
TARGET_K1, TARGET_K21 = 3.8, 4.6


def report(name: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def in_band(value: float, center: float) -> bool:
    return (1 - TOL) * center <= value <= (1 + TOL) * center


def scheme_series(rows, kind: str, value=None):
    """Per-realization SSR array for one scheme (and axis value), ordered
    by realization so CRN-paired schemes align index by index."""
    picked = [r for r in rows if r.scheme == kind
              and (value is None or r.axis_value == value)]
    picked.sort(key=lambda r: r.realization_index)
    return np.array([r.ssr_total_bits for r in picked])


def paired_gap_ci(a: np.ndarray, b: np.ndarray, seed: int = 0):
    """Bootstrap 95% CI of mean(a - b); pairing via common realizations."""
    d = a - b
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, d.size, size=(4000, d.size))
    boot = d[idx].mean(axis=1)
    return float(np.quantile(boot, 0.025)), float(np.quantile(boot, 0.975))


def group_means(rows):
    acc = {}
    for r in rows:
        acc.setdefault((r.scheme, r.axis_value), []).append(r.ssr_total_bits)
    return {k: float(np.mean(v)) for k, v in acc.items()}


# -- shared sweeps -----------------------------------------------------------

@pytest.fixture(scope="module")
def m16_rows():
    spec = ExperimentSpec(
        sweep_axis="m_tx", axis_values=(16,), schemes=ALL_SCHEMES,
        n_realizations=100, system=BENCH_SYSTEM, optimizer=SWEEP_BUDGET,
        master_seed=MASTER_SEED)
    return harness.run(spec)


@pytest.fixture(scope="module")
def n64_rows():
    spec = ExperimentSpec(
        sweep_axis="n_elements", axis_values=(64,),
        schemes=(SchemeSpec("proposed"),), n_realizations=100,
        system=BENCH_SYSTEM, optimizer=ELEMENT_SWEEP_BUDGET,
        master_seed=MASTER_SEED)
    return harness.run(spec)


@pytest.fixture(scope="module")
def nmse_rows():
    spec = ExperimentSpec(
        sweep_axis="nmse", axis_values=(0.0, 0.01, 0.05, 0.1),
        schemes=ALL_SCHEMES, n_realizations=50, system=BENCH_SYSTEM,
        optimizer=SWEEP_BUDGET, master_seed=MASTER_SEED)
    return harness.run(spec)


@pytest.fixture(scope="module")
def ksweep_rows():
    spec = ExperimentSpec(
        sweep_axis="n_sub", axis_values=(1, 6, 11, 16, 21),
        schemes=(SchemeSpec("proposed"),), n_realizations=150,
        system=BENCH_SYSTEM, optimizer=SWEEP_BUDGET, master_seed=MASTER_SEED)
    return harness.run(spec)


@pytest.fixture(scope="module")
def position_rows():
    return harness.run(preset("fig6"))


@pytest.fixture(scope="module")
def desk_rows():
    spec = ExperimentSpec(
        sweep_axis="m_tx", axis_values=(8,), schemes=(SchemeSpec("proposed"),),
        n_realizations=50, system=DESK_SYSTEM, optimizer=TRACE_BUDGET,
        master_seed=MASTER_SEED)
    return harness.run(spec)


@pytest.fixture(scope="module")
def trace_rows_and_determinism(tmp_path_factory):
    """fig2 preset run twice: returns (rows, bytes_identical, secs_per_run)."""
    tmp = tmp_path_factory.mktemp("determinism")
    p1, p2 = tmp / "a.csv", tmp / "b.csv"
    t0 = time.time()
    rows = harness.run(preset("fig2", str(p1)))
    elapsed = time.time() - t0
    harness.run(preset("fig2", str(p2)))
    return rows, p1.read_bytes() == p2.read_bytes(), elapsed


@pytest.fixture(scope="module")
def full_runs():
    """Direct descent runs carrying complete residual traces: three at
    benchmark scale plus two at desk scale."""
    runs = []
    for i in range(3):
        ch = generate(BENCH_SYSTEM, SceneGeometry(), keyed_rng(71, "purity", i))
        prob = Problem(channels=ch, cfg=BENCH_SYSTEM)
        init = prob.random_point(keyed_rng(71, "purity-init", i))
        runs.append(prgd.solve(prob, init, SWEEP_BUDGET))
    for i in range(2):
        ch = generate(DESK_SYSTEM, SceneGeometry(), keyed_rng(72, "purity", i))
        prob = Problem(channels=ch, cfg=DESK_SYSTEM)
        init = prob.random_point(keyed_rng(72, "purity-init", i))
        runs.append(prgd.solve(prob, init, TRACE_BUDGET))
    return runs


# -- criteria -----------------------------------------------------------------

def test_c01_gradient_finite_differences():
    """All three gradient blocks against central differences on 20 small
    instances, every coordinate, within 1e-5 relative error, under a
    minute."""
    cfg = SystemConfig(m_tx=4, n_bob=2, n_eve=2, n_streams=2, n_sub=2,
                       n_irs1=6, n_irs2=6, power_watts=1.0,
                       noise_bob_watts=1e-11, noise_eve_watts=1e-11)
    t0 = time.time()
    worst = 0.0
    eps = 1e-6
    for i in range(20):
        ch = generate(cfg, SceneGeometry(), keyed_rng(77, "fd", i))
        prob = Problem(channels=ch, cfg=cfg)
        pt = prob.random_point(keyed_rng(77, "fd-init", i))
        grad, _ = euclidean_gradient(ch, pt, cfg)
        for attr, got in (("w_blocks", grad.xi_blocks),
                          ("phi1", grad.psi1), ("phi2", grad.psi2)):
            arr = getattr(pt, attr)
            flat = arr.ravel()
            gflat = got.ravel()
            for j in range(flat.size):
                fd = 0.0
                for unit in (1.0, 1.0j):
                    shifted = flat.copy()
                    shifted[j] += unit * eps
                    parts = {"w_blocks": pt.w_blocks, "phi1": pt.phi1,
                             "phi2": pt.phi2, attr: shifted.reshape(arr.shape)}
                    f_plus = objective(ch, IteratePoint(**parts), cfg)
                    shifted = flat.copy()
                    shifted[j] -= unit * eps
                    parts[attr] = shifted.reshape(arr.shape)
                    f_minus = objective(ch, IteratePoint(**parts), cfg)
                    d = (f_plus - f_minus) / (2 * eps)
                    fd += d if unit == 1.0 else 1j * d
                err = abs(gflat[j] - fd) / max(1.0, abs(fd))
                worst = max(worst, err)
    elapsed = time.time() - t0
    report("gradient-finite-differences",
           worst <= 1e-5 and elapsed < 60.0,
           f"20 instances, worst rel err {worst:.2e}, {elapsed:.1f}s")


def test_c02_manifold_purity(full_runs):
    """Post-retraction constraint residuals and gradient tangency at
    every iteration of full runs."""
    worst_c = max(max(r.constraint_residual_trace) for r in full_runs)
    worst_t = max(max(r.tangency_residual_trace) for r in full_runs)
    report("manifold-purity",
           worst_c <= 1e-12 and worst_t <= 1e-10,
           f"{len(full_runs)} runs, constraint {worst_c:.2e} (<=1e-12), "
           f"tangency {worst_t:.2e} (<=1e-10)")


def test_c03_descent_certificate(full_runs):
    """Every accepted step drops the objective by at least half the step
    size times the squared gradient norm, and traces are monotone."""
    worst_slack, mono = 0.0, True
    steps = 0
    for res in full_runs:
        diffs = -np.diff(res.objective_trace)
        mono &= bool(np.all(diffs >= -1e-12))
        for t, alpha in enumerate(res.step_trace):
            promised = 0.5 * alpha * res.grad_norm_trace[t] ** 2
            worst_slack = max(worst_slack, promised - diffs[t])
            steps += 1
    report("descent-certificate",
           mono and worst_slack <= 1e-9,
           f"{steps} steps, worst certificate slack {worst_slack:.2e} "
           f"(<=1e-9), monotone={mono}")


def test_c04_convergence_budgets(desk_rows, trace_rows_and_determinism):
    """Two-part convergence target. Desk scale: stationarity (gradient
    norm <= 1e-4) within 500 iterations on at least 90% of 50
    realizations. Benchmark scale (M=16, N=48, K=10, 5 realizations):
    monotone traces that realize at least 85% of their total
    500-iteration improvement by iteration 200, well under the
    10-minute-per-run budget.

    KNOWN MISS (both parts). Desk: this optimizer reaches 1e-4 only
    after several thousand iterations (measured first hits ~5e3-8e3,
    grad norms ~1e-2 at iteration 500); the hit rate is 0/50. Benchmark
    scale: four of five traces clear the 85% bar but one sits at
    80.8%, a narrow miss of the roughly-200-iteration claim under the
    operationalization fixed before measurement. The descent itself is
    sound everywhere (monotone, certificate-clean); the gap is purely
    between first-order methods and these convergence-speed targets.
    """
    hits = sum(1 for r in desk_rows if r.final_grad_norm <= 1e-4)
    desk_ok = hits >= 45

    rows, _, elapsed = trace_rows_and_determinism
    traces = {}
    for r in rows:
        traces.setdefault((r.axis_value, r.realization_index), {})[
            r.iterations_used] = r.ssr_total_bits
    mono_ok = True
    fracs = []
    for (m_tx, _), tr in sorted(traces.items()):
        ts = sorted(tr)
        vals = [tr[t] for t in ts]
        mono_ok &= all(b >= a - 1e-9 for a, b in zip(vals, vals[1:]))
        if m_tx == BENCH_SYSTEM.m_tx:
            total = vals[-1] - vals[0]
            fracs.append((tr[min(200, ts[-1])] - vals[0]) / total)
    per_run = elapsed / max(1, len(traces))
    bench_ok = (mono_ok and len(fracs) >= 5 and per_run < 600
                and all(f >= 0.85 for f in fracs))
    report("convergence-budgets",
           desk_ok and bench_ok,
           f"desk stationarity {hits}/50 (need >=45); benchmark-scale "
           f"{len(fracs)} traces monotone={mono_ok}, 200-iter fractions "
           f"{[f'{f:.3f}' for f in fracs]} (each >=0.85), "
           f"{per_run:.1f}s/run")


def test_c05_benchmark_means_and_ordering(m16_rows, n64_rows):
    """Mean proposed SSR inside the target bands at (M=16, N=48) and
    (M=16, N=64), and the scheme ordering
    proposed > AOM > GD > DD > {SBob, SAlice} > R
    with positive paired-bootstrap 95% gaps.

    KNOWN MISS (one link): DD > SBob fails. A single near-Bob surface
    with N1+N2 elements has coherent aperture (N1+N2)^2 on its best
    path, which at this geometry beats two uncoupled N-element
    surfaces (N1^2 + N2^2 scaling); measured means ~4.63 (DD) vs
    ~5.11 (SBob). No iteration budget changes the sign: it is a
    physics gap, not an optimizer artifact.
    """
    failures = []
    details = []

    mean_m16 = float(np.mean(scheme_series(m16_rows, "proposed")))
    if not in_band(mean_m16, TARGET_MEAN_M16):
        failures.append("m16-band")
    details.append(f"M16 mean {mean_m16:.3f} vs {TARGET_MEAN_M16}+-15%")

    mean_n64 = float(np.mean(scheme_series(n64_rows, "proposed")))
    if not in_band(mean_n64, TARGET_MEAN_N64):
        failures.append("n64-band")
    details.append(f"N64 mean {mean_n64:.3f} vs {TARGET_MEAN_N64}+-15%")

    links = (("proposed", "aom_irs"), ("aom_irs", "gd_irs"),
             ("gd_irs", "dd_irs"), ("dd_irs", "sbob_irs"),
             ("dd_irs", "salice_irs"), ("sbob_irs", "r_irs"),
             ("salice_irs", "r_irs"))
    for hi, lo in links:
        lo_ci, _ = paired_gap_ci(scheme_series(m16_rows, hi),
                                 scheme_series(m16_rows, lo))
        if not lo_ci > 0:
            failures.append(f"{hi}>{lo}")
            details.append(f"{hi}>{lo} ci_low {lo_ci:+.3f}")
    report("benchmark-means-and-ordering", not failures,
           "; ".join(details) + (f"; failed: {failures}" if failures else ""))


def test_c06_relative_gains(m16_rows):
    """Mean-SSR shortfall of each baseline relative to proposed at
    M=16: uncoupled double-IRS in [10%, 30%], each single-IRS in
    [18%, 40%], random phases in [45%, 70%].

    KNOWN MISS (two bands): the uncoupled-double gain is ~7.7% (the
    uncoupled baseline optimizes too well at this budget to lose 10%),
    and the near-Bob single-surface gain is ~-1.8% (it beats proposed;
    same aperture physics as the ordering miss). The near-Alice single
    (~19.5%) and random-phase (~45.5%) gains sit inside their bands.
    """
    prop = float(np.mean(scheme_series(m16_rows, "proposed")))
    bands = (("dd_irs", 10.0, 30.0), ("sbob_irs", 18.0, 40.0),
             ("salice_irs", 18.0, 40.0), ("r_irs", 45.0, 70.0))
    failures, details = [], []
    for kind, lo, hi in bands:
        other = float(np.mean(scheme_series(m16_rows, kind)))
        gain = 100.0 * (prop - other) / prop
        details.append(f"{kind} {gain:+.1f}% vs [{lo:.0f},{hi:.0f}]")
        if not lo <= gain <= hi:
            failures.append(kind)
    report("relative-gains", not failures,
           "; ".join(details) + (f"; failed: {failures}" if failures else ""))


def test_c07_estimation_error_robustness(nmse_rows):
    """Mean SSR non-increasing in the channel-error level delta for
    every scheme, with proposed top-ranked at every delta.

    KNOWN MISS (top rank): the near-Bob single surface outranks
    proposed at every delta at this scale (same aperture physics as
    the ordering miss); the degradation trend itself holds for all
    seven schemes.
    """
    means = group_means(nmse_rows)
    deltas = sorted({v for _, v in means})
    failures, details = [], []
    for spec in ALL_SCHEMES:
        seq = [means[(spec.kind, d)] for d in deltas]
        if not all(a >= b - 1e-12 for a, b in zip(seq, seq[1:])):
            failures.append(f"monotone:{spec.kind}")
    details.append(f"monotone over deltas {deltas} for all schemes"
                   if not failures else "monotone violated")
    for d in deltas:
        top = max((means[(s.kind, d)], s.kind) for s in ALL_SCHEMES)[1]
        if top != "proposed":
            failures.append(f"top@{d}:{top}")
            details.append(f"top at delta={d} is {top} "
                           f"({means[(top, d)]:.3f} vs proposed "
                           f"{means[('proposed', d)]:.3f})")
    report("estimation-error-robustness", not failures, "; ".join(details))


def test_c08_subcarrier_scaling(ksweep_rows):
    """Mean proposed SSR strictly increasing over K in {1, 6, 11, 16,
    21} at fixed total power, with the K=1 mean inside 3.8 +- 15% and
    the K=21 mean inside 4.6 +- 15%; 150 realizations."""
    means = group_means(ksweep_rows)
    ks = sorted(v for _, v in means)
    seq = [means[("proposed", k)] for k in ks]
    increasing = all(a < b for a, b in zip(seq, seq[1:]))
    ok = increasing and in_band(seq[0], TARGET_K1) \
        and in_band(seq[-1], TARGET_K21)
    report("subcarrier-scaling", ok,
           f"means {[f'{m:.3f}' for m in seq]} increasing={increasing}, "
           f"K=1 vs {TARGET_K1}+-15%, K=21 vs {TARGET_K21}+-15%")


def test_c09_deployment_optimum(position_rows):
    """The argmax cell of mean SSR over the 5x5 placement grid lies
    within one grid step of the corner that puts IRS 1 nearest Alice
    and IRS 2 nearest Bob; 20 realizations per cell."""
    means = group_means(position_rows)
    (_, code), best = max(means.items(), key=lambda kv: kv[1])
    x1, x2 = divmod(int(code), 100)
    ok = x1 in (0, 5) and x2 in (55, 60)
    report("deployment-optimum", ok,
           f"argmax cell (x1={x1}, x2={x2}) mean {best:.3f}; "
           f"required x1 in {{0,5}}, x2 in {{55,60}}")


def test_c10_byte_determinism(trace_rows_and_determinism):
    """Re-running a preset with the same master seed writes a
    byte-identical CSV."""
    _, identical, _ = trace_rows_and_determinism
    report("byte-determinism", identical,
           "two fig2 preset runs " +
           ("byte-identical" if identical else "DIFFER"))
