"""Command-line front end: run sweeps, summarize result files, self-test.

Exit code 0 on success; any failure prints one machine-readable line
``DIRSEC-ERROR {json}`` to stderr and exits nonzero.  Spec files are
JSON; unspecified system/geometry/optimizer fields fall back to the
benchmark defaults.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import replace

from . import channel, harness, manifold, prgd
from .baselines import SchemeSpec
from .channel import SceneGeometry
from .harness import ExperimentSpec, PRESET_NAMES
from .prgd import OptimizerConfig, Problem
from .secrecy import SystemConfig


def spec_from_json(path) -> ExperimentSpec:
    with open(path) as fh:
        doc = json.load(fh)
    system = replace(harness.BENCH_SYSTEM, **doc.get("system", {}))
    geo_fields = {k: tuple(v) if k.startswith("pos_") else v
                  for k, v in doc.get("geometry", {}).items()}
    geometry = replace(SceneGeometry(), **geo_fields)
    optimizer = replace(OptimizerConfig(), **doc.get("optimizer", {}))
    schemes = tuple(
        SchemeSpec(**s) if isinstance(s, dict) else SchemeSpec(s)
        for s in doc["schemes"])
    return ExperimentSpec(
        sweep_axis=doc["sweep_axis"],
        axis_values=tuple(doc["axis_values"]),
        schemes=schemes,
        n_realizations=int(doc["n_realizations"]),
        system=system, geometry=geometry, optimizer=optimizer,
        master_seed=int(doc.get("master_seed", 0)),
        output_path=doc.get("output_path"))


def _progress(done: int, total: int) -> None:
    if done == total or done % 25 == 0:
        print(f"{done}/{total} cells", file=sys.stderr, flush=True)


def _cmd_run(args) -> int:
    if (args.preset is None) == (args.spec is None):
        raise ValueError("run needs exactly one of --preset or --spec")
    if args.preset is not None:
        spec = harness.preset(args.preset, args.out or f"{args.preset}.csv")
    else:
        spec = spec_from_json(args.spec)
        if args.out is not None:
            spec = replace(spec, output_path=args.out)
        if spec.output_path is None:
            raise ValueError("no output path (set output_path or --out)")
    rows = harness.run(spec, threads=args.threads, progress=_progress)
    print(f"wrote {len(rows)} rows to {spec.output_path}")
    return 0


def _cmd_summarize(args) -> int:
    rows = harness.read_csv(args.results)
    summaries, warnings = harness.summarize(rows)
    lines = [f"{'scheme':<12s} {'value':>10s} {'n':>5s} {'mean':>9s} "
             f"{'se':>8s} {'ci95_low':>9s} {'ci95_high':>9s}"]
    for s in summaries:
        lines.append(f"{s.scheme:<12s} {harness._fmt_number(s.axis_value):>10s} "
                     f"{s.count:>5d} {s.mean:>9.4f} {s.std_error:>8.4f} "
                     f"{s.ci_low:>9.4f} {s.ci_high:>9.4f}")
    lines.extend(f"warning: {w}" for w in warnings)
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _selftest_spec(out_path) -> ExperimentSpec:
    return ExperimentSpec(
        sweep_axis="m_tx", axis_values=(4, 6), schemes=("proposed", "r_irs"),
        n_realizations=3, system=replace(harness.DESK_SYSTEM, m_tx=4,
                                         n_irs1=6, n_irs2=6, n_sub=2),
        optimizer=OptimizerConfig(max_iters=25), master_seed=11,
        output_path=out_path)


def _cmd_selftest(args) -> int:
    checks = []

    # gradient versus central differences on a tiny instance
    cfg = replace(harness.DESK_SYSTEM, m_tx=4, n_irs1=6, n_irs2=6, n_sub=2)
    ch = channel.generate(cfg, SceneGeometry(), channel.keyed_rng(3, "selftest"))
    problem = Problem(channels=ch, cfg=cfg)
    pt = problem.random_point(channel.keyed_rng(3, "selftest", "init"))
    grad, _ = problem.euclidean_gradient(pt)
    eps, worst = 1e-6, 0.0
    for attr, garr in (("w_blocks", grad.xi_blocks), ("phi1", grad.psi1),
                       ("phi2", grad.psi2)):
        arr = getattr(pt, attr)
        flat = arr.ravel()
        idx = 0 if flat.size < 3 else flat.size // 2
        for unit in (1.0, 1.0j):
            def f(h, i=idx, u=unit, a=attr):
                shifted = flat.copy()
                shifted[i] += u * h
                return problem.objective(replace_component(pt, a, shifted.reshape(arr.shape)))
            d = (f(eps) - f(-eps)) / (2.0 * eps)
            want = d if unit == 1.0 else 1.0j * d
            got = garr.ravel()[idx]
            part = want.real if unit == 1.0 else want.imag
            got_part = got.real if unit == 1.0 else got.imag
            worst = max(worst, abs(got_part - part) / max(1.0, abs(part)))
    checks.append(("gradient finite differences", worst <= 1e-5,
                   f"max rel err {worst:.2e}"))

    # determinism: identical micro sweeps must be byte-identical
    with tempfile.TemporaryDirectory() as tmp:
        p1, p2 = os.path.join(tmp, "a.csv"), os.path.join(tmp, "b.csv")
        harness.run(_selftest_spec(p1))
        harness.run(_selftest_spec(p2))
        with open(p1, "rb") as f1, open(p2, "rb") as f2:
            same = f1.read() == f2.read()
        checks.append(("byte-identical rerun", same, ""))
        if args.out:
            harness.run(_selftest_spec(args.out))

    # descent: monotone trace and on-manifold iterates
    res = prgd.solve(problem, pt, OptimizerConfig(max_iters=30))
    trace = res.objective_trace
    mono = all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))
    purity = max(res.constraint_residual_trace) <= 1e-12
    checks.append(("monotone descent", mono, ""))
    checks.append(("constraint purity", purity,
                   f"max residual {max(res.constraint_residual_trace):.2e}"))

    failed = False
    for name, ok, detail in checks:
        status = "ok" if ok else "FAIL"
        suffix = f" ({detail})" if detail else ""
        print(f"selftest: {name}: {status}{suffix}")
        failed |= not ok
    return 1 if failed else 0


def replace_component(pt: manifold.IteratePoint, attr: str, value):
    parts = {"w_blocks": pt.w_blocks, "phi1": pt.phi1, "phi2": pt.phi2}
    parts[attr] = value
    return manifold.IteratePoint(**parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dirsec",
        description="Secrecy-rate sweeps for double-IRS MIMO-OFDM")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a sweep and write CSV")
    p_run.add_argument("--preset", choices=PRESET_NAMES)
    p_run.add_argument("--spec", help="JSON experiment spec file")
    p_run.add_argument("--out", help="output CSV path")
    p_run.add_argument("--threads", type=int, default=1)
    p_run.set_defaults(func=_cmd_run)

    p_sum = sub.add_parser("summarize", help="aggregate a results CSV")
    p_sum.add_argument("results", help="results CSV path")
    p_sum.add_argument("--out", help="write the table here instead of stdout")
    p_sum.set_defaults(func=_cmd_summarize)

    p_self = sub.add_parser("selftest", help="quick correctness checks")
    p_self.add_argument("--out", help="also write a small fixture CSV here")
    p_self.set_defaults(func=_cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as err:  # noqa: BLE001 - the CLI boundary
        payload = {"error": type(err).__name__, "message": str(err)}
        print(f"DIRSEC-ERROR {json.dumps(payload)}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
