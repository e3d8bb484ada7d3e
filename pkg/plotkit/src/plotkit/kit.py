"""Figure rendering for dirsec benchmark CSVs.

This package talks to the optimizer library only through its versioned
CSV schema (``# dirsec-results v1``); nothing here imports dirsec.  A
:class:`PlotSpec` names an input CSV, an output image and a figure
kind, and :func:`render` turns it into one image:

* ``line_sweep``   mean SSR vs. the swept parameter, one errorbar line
  per scheme (bars are 1.96 standard errors),
* ``convergence``  mean SSR trace vs. iteration, one line per swept
  antenna count,
* ``heatmap``      mean SSR over the two IRS x-positions.

Extraction and drawing are split: :func:`extract_model` reduces the CSV
to a plain :class:`FigureModel` of tuples, and :func:`draw` rasterizes
it.  Tests assert on the model, not on pixels.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field, replace

import matplotlib

matplotlib.use("Agg")  # rendering is file-to-file, never interactive

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

CSV_HEADER = "# dirsec-results v1"
CSV_COLUMNS = ("scheme", "axis", "value", "realization", "seed",
               "ssr_bits", "iters", "grad_norm", "wall_ms")

FIGURE_KINDS = ("convergence", "line_sweep", "heatmap")

# Which axis column each figure kind can render.
_KIND_AXES = {
    "convergence": ("iterations",),
    "line_sweep": ("m_tx", "n_elements", "n_sub", "nmse"),
    "heatmap": ("irs_positions",),
}

_DEFAULT_X_LABEL = {
    "iterations": "iteration",
    "m_tx": "transmit antennas",
    "n_elements": "reflecting elements per IRS",
    "n_sub": "subcarriers",
    "nmse": "channel estimation error level",
    "irs_positions": "IRS 2 x-position (m)",
}

# Canonical legend order for the scheme vocabulary of the CSV schema;
# kinds not listed here sort alphabetically after these.
_SCHEME_ORDER = ("proposed", "aom_irs", "gd_irs", "dd_irs",
                 "sbob_irs", "salice_irs", "r_irs")


class PlotKitError(ValueError):
    """Base class for all plotkit failures."""


class SchemaError(PlotKitError):
    """The input file is not a dirsec-results CSV of the supported version."""


class EmptyGroupError(PlotKitError):
    """A group that the figure needs has no rows."""


class SpecError(PlotKitError):
    """The PlotSpec is self-inconsistent or inconsistent with the CSV."""


@dataclass(frozen=True)
class PlotSpec:
    """One figure request.

    ``scheme_labels`` maps scheme kinds to legend display names; kinds
    it names must exist in the CSV, kinds it omits keep their raw name.
    Empty ``x_label``/``title`` fall back to defaults derived from the
    CSV's axis column.
    """

    figure_kind: str
    input_csv: str
    output_image: str
    x_label: str = ""
    y_label: str = ""
    title: str = ""
    scheme_labels: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure_kind not in FIGURE_KINDS:
            raise SpecError(f"unknown figure_kind {self.figure_kind!r}; "
                            f"expected one of {FIGURE_KINDS}")
        if not self.input_csv or not self.output_image:
            raise SpecError("input_csv and output_image are required")


def spec_from_json(path) -> PlotSpec:
    """Load a PlotSpec from a JSON object file; unknown keys are errors."""
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise SpecError(f"{path}: spec must be a JSON object")
    allowed = {"figure_kind", "input_csv", "output_image",
               "x_label", "y_label", "title", "scheme_labels"}
    unknown = set(raw) - allowed
    if unknown:
        raise SpecError(f"{path}: unknown spec fields {sorted(unknown)}")
    return PlotSpec(**raw)


@dataclass(frozen=True)
class Row:
    scheme: str
    axis: str
    value: float
    realization: int
    ssr: float
    iters: int


@dataclass(frozen=True)
class SeriesModel:
    """One legend entry.

    ``y`` holds group means and ``se`` their standard errors (empty for
    trace figures); the raster step draws 1.96 se error bars.
    """

    label: str
    x: tuple
    y: tuple
    se: tuple = ()


@dataclass(frozen=True)
class FigureModel:
    """Everything the raster step consumes, as plain tuples.

    ``series`` carries line figures; the ``grid_*`` fields carry the
    heatmap (``grid_z`` is row-major over ``grid_y`` then ``grid_x``,
    NaN for cells absent from the CSV).
    """

    kind: str
    x_label: str
    y_label: str
    title: str
    series: tuple = ()
    grid_x: tuple = ()
    grid_y: tuple = ()
    grid_z: tuple = ()


@dataclass(frozen=True)
class RenderResult:
    output_image: str
    model: FigureModel
    xlim: tuple
    ylim: tuple


def read_rows(path) -> list:
    """Parse a versioned results CSV into Row records.

    Anything that is not a v1 dirsec-results file raises SchemaError:
    wrong or missing header line, wrong column line, or a row that does
    not parse under the column types.
    """
    with open(path, newline="") as fh:
        header = fh.readline().rstrip("\n")
        if header != CSV_HEADER:
            raise SchemaError(
                f"{path}: unsupported schema header {header!r}; "
                f"this plotkit reads {CSV_HEADER!r}")
        names = fh.readline().rstrip("\n")
        if names != ",".join(CSV_COLUMNS):
            raise SchemaError(f"{path}: unexpected column line {names!r}")
        rows = []
        for record in csv.DictReader(fh, fieldnames=CSV_COLUMNS):
            try:
                rows.append(Row(scheme=record["scheme"],
                                axis=record["axis"],
                                value=float(record["value"]),
                                realization=int(record["realization"]),
                                ssr=float(record["ssr_bits"]),
                                iters=int(record["iters"])))
            except (TypeError, ValueError, KeyError) as exc:
                raise SchemaError(f"{path}: malformed row {record}") from exc
    return rows


def _mean(vals) -> float:
    return sum(vals) / len(vals)


def _std_error(vals) -> float:
    n = len(vals)
    if n < 2:
        return 0.0
    m = _mean(vals)
    return math.sqrt(sum((v - m) ** 2 for v in vals) / (n - 1)) / math.sqrt(n)


def _scheme_sort_key(kind: str):
    try:
        return (0, _SCHEME_ORDER.index(kind))
    except ValueError:
        return (1, kind)


def _display(spec: PlotSpec, kind: str) -> str:
    return spec.scheme_labels.get(kind, kind)


def _line_sweep_series(spec: PlotSpec, rows) -> tuple:
    groups = {}
    for r in rows:
        groups.setdefault(r.scheme, {}).setdefault(r.value, []).append(r.ssr)
    series = []
    for kind in sorted(groups, key=_scheme_sort_key):
        xs = sorted(groups[kind])
        series.append(SeriesModel(
            label=_display(spec, kind),
            x=tuple(xs),
            y=tuple(_mean(groups[kind][x]) for x in xs),
            se=tuple(_std_error(groups[kind][x]) for x in xs)))
    return tuple(series)


def _convergence_series(spec: PlotSpec, rows) -> tuple:
    # traces: {axis value: {realization: {iteration: ssr}}}
    traces = {}
    for r in rows:
        traces.setdefault(r.value, {}).setdefault(
            r.realization, {})[r.iters] = r.ssr
    series = []
    for value in sorted(traces):
        ts = sorted({t for tr in traces[value].values() for t in tr})
        means = []
        for t in ts:
            # a realization that stopped early holds its final value
            vals = []
            for tr in traces[value].values():
                have = [it for it in tr if it <= t]
                if not have:
                    raise EmptyGroupError(
                        f"empty group: trace for value {value} has no "
                        f"iteration <= {t}")
                vals.append(tr[max(have)])
            means.append(_mean(vals))
        label = _display(spec, rows[0].scheme) if len(traces) == 1 \
            else f"M = {int(value)}"
        series.append(SeriesModel(label=label, x=tuple(float(t) for t in ts),
                                  y=tuple(means)))
    return tuple(series)


def _heatmap_grid(spec: PlotSpec, rows, path) -> tuple:
    kinds = sorted({r.scheme for r in rows})
    if len(kinds) != 1:
        raise SpecError(f"{path}: heatmap needs exactly one scheme, "
                        f"found {kinds}")
    cells = {}
    for r in rows:
        x1, x2 = divmod(int(r.value), 100)  # value encodes 100*x1 + x2
        cells.setdefault((x1, x2), []).append(r.ssr)
    x1s = tuple(sorted({c[0] for c in cells}))
    x2s = tuple(sorted({c[1] for c in cells}))
    z = tuple(tuple(_mean(cells[(a, b)]) if (a, b) in cells else math.nan
                    for b in x2s) for a in x1s)
    return x2s, x1s, z


def extract_model(spec: PlotSpec) -> FigureModel:
    """Reduce the CSV named by ``spec`` to the figure's data model."""
    path = spec.input_csv
    rows = read_rows(path)
    if not rows:
        raise EmptyGroupError(f"empty group: {path} has a valid header "
                              f"but no data rows")
    axes = sorted({r.axis for r in rows})
    if len(axes) != 1:
        raise SchemaError(f"{path}: mixed axis columns {axes}")
    axis = axes[0]
    if axis not in _KIND_AXES[spec.figure_kind]:
        raise SpecError(
            f"figure_kind {spec.figure_kind!r} renders axis "
            f"{_KIND_AXES[spec.figure_kind]}, but {path} sweeps {axis!r}")
    present = {r.scheme for r in rows}
    for kind in spec.scheme_labels:
        if kind not in present:
            raise EmptyGroupError(
                f"empty group: scheme {kind!r} has no rows in {path}")

    x_label = spec.x_label or _DEFAULT_X_LABEL[axis]
    y_default = "IRS 1 x-position (m)" if spec.figure_kind == "heatmap" \
        else "secrecy sum-rate (bits/s/Hz)"
    model = FigureModel(kind=spec.figure_kind, x_label=x_label,
                        y_label=spec.y_label or y_default, title=spec.title)
    if spec.figure_kind == "line_sweep":
        return replace(model, series=_line_sweep_series(spec, rows))
    if spec.figure_kind == "convergence":
        return replace(model, series=_convergence_series(spec, rows))
    grid_x, grid_y, grid_z = _heatmap_grid(spec, rows, path)
    return replace(model, grid_x=grid_x, grid_y=grid_y, grid_z=grid_z)


def draw(model: FigureModel, path) -> tuple:
    """Rasterize a FigureModel to ``path``; returns (xlim, ylim)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.2), constrained_layout=True)
    try:
        if model.kind == "heatmap":
            im = ax.imshow([list(row) for row in model.grid_z],
                           origin="lower", aspect="auto", cmap="viridis")
            ax.set_xticks(range(len(model.grid_x)),
                          labels=[f"{v:g}" for v in model.grid_x])
            ax.set_yticks(range(len(model.grid_y)),
                          labels=[f"{v:g}" for v in model.grid_y])
            fig.colorbar(im, ax=ax,
                         label="mean secrecy sum-rate (bits/s/Hz)")
        else:
            for s in model.series:
                yerr = [1.96 * e for e in s.se] if any(s.se) else None
                ax.errorbar(s.x, s.y, yerr=yerr, marker="o", markersize=3,
                            capsize=3, linewidth=1.2, label=s.label)
            ax.legend(fontsize=8)
            ax.grid(True, alpha=0.3)
        ax.set_xlabel(model.x_label)
        ax.set_ylabel(model.y_label)
        if model.title:
            ax.set_title(model.title)
        fig.savefig(path, dpi=150)
        return tuple(ax.get_xlim()), tuple(ax.get_ylim())
    finally:
        plt.close(fig)


def render(spec: PlotSpec) -> RenderResult:
    """Extract the data model and write one image file."""
    model = extract_model(spec)
    xlim, ylim = draw(model, spec.output_image)
    return RenderResult(output_image=spec.output_image, model=model,
                        xlim=xlim, ylim=ylim)
