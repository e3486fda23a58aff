"""Figure descriptions and deterministic rendering.

Three kinds cover the harness outputs: line-sweep (mean with a standard
error band per scheme), cdf (per-scheme empirical SINR distribution),
and trace (mean sum-rate trajectory per stop threshold). Rendering is a
pure function of the CSV: fixed style sheet, no timestamps, so an
unchanged input re-renders byte for byte.
"""

import json
import os
from dataclasses import dataclass, fields
from importlib import resources

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from . import aggregate
from .tables import load_table

LINE_SWEEP = "line-sweep"
CDF = "cdf"
TRACE = "trace"
KINDS = (LINE_SWEEP, CDF, TRACE)

# schemes draw in a fixed order so legends and colors never depend on
# row order; anything unknown sorts after these, alphabetically
_SCHEME_ORDER = {"proposed": 0, "mpt": 1, "rps": 2, "without_ris": 3}

_PNG_METADATA = {"Software": "plotkit"}


class SpecError(ValueError):
    """Bad figure description; the message names the field or file."""


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    csv: str
    out: str
    x: str = ""  # line-sweep axis column; other kinds have fixed axes
    y: str = "sum_rate_b2"
    group: str = "scheme"
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SpecError(f"kind must be one of {', '.join(KINDS)}, got {self.kind!r}")
        if not self.csv:
            raise SpecError("spec needs a 'csv' path")
        if not self.out:
            raise SpecError("spec needs an 'out' path")
        if self.kind == LINE_SWEEP and not self.x:
            raise SpecError("line-sweep needs an 'x' column")


def load_spec(path: str) -> FigureSpec:
    """Read one JSON figure spec; relative paths resolve beside the file."""
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SpecError(f"{path}: not valid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise SpecError(f"{path}: expected a JSON object")
    known = {f.name for f in fields(FigureSpec)}
    unknown = set(raw) - known
    if unknown:
        raise SpecError(f"{path}: unknown spec keys {sorted(unknown)}")
    missing = {"kind", "csv", "out"} - set(raw)
    if missing:
        raise SpecError(f"{path}: missing spec keys {sorted(missing)}")
    base = os.path.dirname(os.path.abspath(path))
    for key in ("csv", "out"):
        if not os.path.isabs(raw[key]):
            raw[key] = os.path.join(base, raw[key])
    return FigureSpec(**raw)


# canonical figure per harness output file, keyed by its default CSV name
PRESETS = {
    "sweep_d2d.csv": dict(kind=LINE_SWEEP, x="d2d_links", xlabel="D2D links D"),
    "sweep_elements.csv": dict(kind=LINE_SWEEP, x="n_per_side", xlabel="surface side N"),
    "sweep_bits.csv": dict(kind=LINE_SWEEP, x="quant_bits", xlabel="quantization bits e"),
    "sweep_sinr.csv": dict(kind=LINE_SWEEP, x="min_sinr_db", xlabel="SINR floor (dB)"),
    "sweep_pos.csv": dict(kind=LINE_SWEEP, x="ris_pos", xlabel="surface position y (m)"),
    "cdf.csv": dict(kind=CDF),
    "convergence.csv": dict(kind=TRACE),
}


def preset_specs(results_dir: str, out_dir: str = "") -> list:
    """One spec per canonical CSV in a completed results directory."""
    out_dir = out_dir or results_dir
    missing = [
        name for name in PRESETS
        if not os.path.exists(os.path.join(results_dir, name))
    ]
    if missing:
        raise SpecError(f"{results_dir}: missing result files {missing}")
    specs = []
    for name, preset in PRESETS.items():
        stem = name[: -len(".csv")]
        specs.append(
            FigureSpec(
                csv=os.path.join(results_dir, name),
                out=os.path.join(out_dir, stem + ".png"),
                **preset,
            )
        )
    return specs


def style_path() -> str:
    return str(resources.files("plotkit").joinpath("styles/plotkit.mplstyle"))


def _group_order(key: str):
    return (_SCHEME_ORDER.get(key, len(_SCHEME_ORDER)), key)


def _draw_line_sweep(ax, spec: FigureSpec, rows):
    curves = aggregate.line_sweep(rows, spec.x, spec.y, spec.group, spec.csv)
    for gv in sorted(curves, key=_group_order):
        xs, means, errs = curves[gv]
        ax.plot(xs, means, marker="o", label=gv)
        lo = [m - e for m, e in zip(means, errs)]
        hi = [m + e for m, e in zip(means, errs)]
        ax.fill_between(xs, lo, hi, alpha=0.2, linewidth=0)
    ax.set_xlabel(spec.xlabel or spec.x)
    ax.set_ylabel(spec.ylabel or "sum rate (bit/s/Hz)")


def _draw_cdf(ax, spec: FigureSpec, rows):
    value = spec.y if spec.y != "sum_rate_b2" else "sinr_db"
    curves = aggregate.ecdf(rows, value, spec.group, spec.csv)
    for gv in sorted(curves, key=_group_order):
        xs, fracs = curves[gv]
        ax.plot(xs, fracs, drawstyle="steps-post", label=gv)
    ax.set_xlabel(spec.xlabel or "achieved SINR (dB)")
    ax.set_ylabel(spec.ylabel or "empirical CDF")
    ax.set_ylim(0.0, 1.02)


def _draw_trace(ax, spec: FigureSpec, rows):
    group = spec.group if spec.group != "scheme" else "epsilon"
    curves = aggregate.traces(rows, "outer_iter", spec.y, group, spec.csv)
    for gv in sorted(curves, key=lambda k: float(k)):
        xs, means = curves[gv]
        ax.plot(xs, means, marker=".", label=f"threshold {gv}")
    ax.set_xlabel(spec.xlabel or "outer iteration")
    ax.set_ylabel(spec.ylabel or "sum rate (bit/s/Hz)")


_DRAWERS = {LINE_SWEEP: _draw_line_sweep, CDF: _draw_cdf, TRACE: _draw_trace}


def render(spec: FigureSpec) -> str:
    """Draw one figure and write it; returns the output path."""
    _, rows = load_table(spec.csv)
    with plt.style.context(style_path()):
        fig, ax = plt.subplots()
        try:
            _DRAWERS[spec.kind](ax, spec, rows)
            if spec.title:
                ax.set_title(spec.title)
            ax.legend()
            fig.tight_layout()
            parent = os.path.dirname(spec.out)
            if parent:
                os.makedirs(parent, exist_ok=True)
            metadata = _PNG_METADATA if spec.out.endswith(".png") else {"Date": None}
            fig.savefig(spec.out, metadata=metadata)
        finally:
            plt.close(fig)
    return spec.out
