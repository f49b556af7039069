"""Serialization: CSV sample dumps, JSON summaries, SVG scatter/line figures.

Everything here is deterministic: identical inputs produce byte-identical
output. Floats in CSV go out with 17 significant digits so a round trip
recovers every bit of a double. SVG is generated textually (no plotting
dependency); regression lines are the only ``path`` elements and data
points the only ``circle`` elements, so figures can be checked by counting
elements.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence
from xml.sax.saxutils import escape

import numpy as np

from .corpus import Dataset
from .inference import LineEnsemble, Summary
from .ols import OlsFit
from .sampler import Chains

__all__ = [
    "PlotSpec",
    "read_samples_csv",
    "render_marginals_svg",
    "render_scatter_svg",
    "write_samples_csv",
    "write_summary_json",
]

_MARGIN_LEFT = 56.0
_MARGIN_RIGHT = 16.0
_MARGIN_TOP = 16.0
_MARGIN_BOTTOM = 44.0
_N_TICKS = 5


@dataclass(frozen=True)
class PlotSpec:
    """Figure geometry; axis ranges default to the data extent padded 5%."""

    width: int = 640
    height: int = 480
    x_range: tuple[float, float] | None = None
    y_range: tuple[float, float] | None = None
    point_radius: float = 4.0
    line_opacity: float = 0.05

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("width and height must be positive")
        for rng in (self.x_range, self.y_range):
            if rng is not None and not rng[1] > rng[0]:
                raise ValueError(f"axis range must be non-degenerate, got {rng}")
        if not 0.0 < self.line_opacity <= 1.0:
            raise ValueError("line opacity must lie in (0, 1]")


def _fmt17(v: float) -> str:
    return format(v, ".17g")


def _open_text(sink, mode: str):
    if hasattr(sink, "write"):
        return sink, False
    return open(Path(sink), mode, encoding="utf-8", newline="\n"), True


def write_samples_csv(chains: Chains, sink: str | Path | IO[str]) -> None:
    """Dump draws as `chain,draw,a,b,sigma` rows ordered by (chain, draw)."""
    if chains.total_draws == 0:
        raise ValueError("cannot write empty chains")
    fh, owned = _open_text(sink, "w")
    try:
        fh.write("chain," + "draw," + ",".join(chains.param_names) + "\n")
        for c in range(chains.n_chains):
            for d in range(chains.n_draws):
                values = ",".join(_fmt17(v) for v in chains.draws[c, d])
                fh.write(f"{c},{d},{values}\n")
    finally:
        if owned:
            fh.close()


def read_samples_csv(source: str | Path | IO[str]) -> Chains:
    """Rebuild Chains from a samples CSV; run metadata is not recoverable."""
    fh, owned = _open_text(source, "r")
    try:
        lines = fh.read().splitlines()
    finally:
        if owned:
            fh.close()
    if not lines:
        raise ValueError("empty samples file")
    header = lines[0].split(",")
    if len(header) < 3 or header[0] != "chain" or header[1] != "draw":
        raise ValueError(f"unexpected header {lines[0]!r}")
    param_names = tuple(header[2:])
    rows: dict[int, list[list[float]]] = {}
    for line in lines[1:]:
        fields = line.split(",")
        chain = int(fields[0])
        rows.setdefault(chain, []).append([float(v) for v in fields[2:]])
    n_chains = len(rows)
    counts = {len(v) for v in rows.values()}
    if sorted(rows) != list(range(n_chains)) or len(counts) != 1:
        raise ValueError("samples file has ragged or non-contiguous chains")
    draws = np.array([rows[c] for c in range(n_chains)], dtype=float)
    return Chains(draws=draws, param_names=param_names)


def _summary_payload(summary: Summary) -> dict:
    params = {}
    for name, s in summary.params.items():
        params[name] = {
            "mean": s.mean,
            "sd": s.sd,
            "quantiles": {"2.5%": s.q2_5, "50%": s.median, "97.5%": s.q97_5},
            "rhat": s.rhat,
            "ess": s.ess,
        }
    return {"parameters": params}


def write_summary_json(summary: Summary, sink: str | Path | IO[str]) -> None:
    """Summary as JSON with a fixed key order; undefined diagnostics are null."""
    fh, owned = _open_text(sink, "w")
    try:
        json.dump(_summary_payload(summary), fh, indent=2, allow_nan=False)
        fh.write("\n")
    finally:
        if owned:
            fh.close()


# ---------------------------------------------------------------------------
# SVG figures


def _padded(lo: float, hi: float) -> tuple[float, float]:
    span = hi - lo
    pad = 0.05 * span if span > 0 else 1.0
    return lo - pad, hi + pad


def _px(v: float) -> str:
    return f"{v:.2f}"


class _Frame:
    """Maps data coordinates onto the pixel plot area (y axis flipped)."""

    def __init__(self, plot: PlotSpec, x_range, y_range):
        self.x_lo, self.x_hi = x_range
        self.y_lo, self.y_hi = y_range
        self.left = _MARGIN_LEFT
        self.right = plot.width - _MARGIN_RIGHT
        self.top = _MARGIN_TOP
        self.bottom = plot.height - _MARGIN_BOTTOM

    def x(self, v: float) -> float:
        t = (v - self.x_lo) / (self.x_hi - self.x_lo)
        return self.left + t * (self.right - self.left)

    def y(self, v: float) -> float:
        t = (v - self.y_lo) / (self.y_hi - self.y_lo)
        return self.bottom - t * (self.bottom - self.top)


def _axes(frame: _Frame, x_label: str, y_label: str) -> list[str]:
    parts = [
        f'<line x1="{_px(frame.left)}" y1="{_px(frame.bottom)}" '
        f'x2="{_px(frame.right)}" y2="{_px(frame.bottom)}" stroke="black"/>',
        f'<line x1="{_px(frame.left)}" y1="{_px(frame.top)}" '
        f'x2="{_px(frame.left)}" y2="{_px(frame.bottom)}" stroke="black"/>',
    ]
    for i in range(_N_TICKS):
        t = i / (_N_TICKS - 1)
        xv = frame.x_lo + t * (frame.x_hi - frame.x_lo)
        xp = frame.x(xv)
        parts.append(
            f'<line x1="{_px(xp)}" y1="{_px(frame.bottom)}" '
            f'x2="{_px(xp)}" y2="{_px(frame.bottom + 5)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_px(xp)}" y="{_px(frame.bottom + 18)}" font-size="11" '
            f'text-anchor="middle">{escape(f"{xv:.4g}")}</text>'
        )
        yv = frame.y_lo + t * (frame.y_hi - frame.y_lo)
        yp = frame.y(yv)
        parts.append(
            f'<line x1="{_px(frame.left - 5)}" y1="{_px(yp)}" '
            f'x2="{_px(frame.left)}" y2="{_px(yp)}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_px(frame.left - 8)}" y="{_px(yp + 4)}" font-size="11" '
            f'text-anchor="end">{escape(f"{yv:.4g}")}</text>'
        )
    mid_x = (frame.left + frame.right) / 2
    mid_y = (frame.top + frame.bottom) / 2
    parts.append(
        f'<text x="{_px(mid_x)}" y="{_px(frame.bottom + 36)}" font-size="13" '
        f'text-anchor="middle">{escape(x_label)}</text>'
    )
    parts.append(
        f'<text x="14" y="{_px(mid_y)}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 14 {_px(mid_y)})">{escape(y_label)}</text>'
    )
    return parts


def _line_path(frame: _Frame, slope: float, intercept: float, opacity: float) -> str:
    x1, x2 = frame.x_lo, frame.x_hi
    y1 = slope * x1 + intercept
    y2 = slope * x2 + intercept
    d = f"M {_px(frame.x(x1))} {_px(frame.y(y1))} L {_px(frame.x(x2))} {_px(frame.y(y2))}"
    op = "" if opacity >= 1.0 else f' stroke-opacity="{opacity:g}"'
    return f'<path d="{d}" stroke="red" stroke-width="1.5" fill="none"{op}/>'


def render_scatter_svg(
    data: Dataset,
    fit: OlsFit | LineEnsemble,
    plot: PlotSpec,
    sink: str | Path | IO[str],
    x_label: str = "x",
    y_label: str = "y",
) -> None:
    """Scatter of the dataset with one regression line (OlsFit) or an ensemble.

    Each data point is one labelled ``circle``; each line is one ``path``
    clipped to the plot area.
    """
    if data.size < 1:
        raise ValueError("cannot plot an empty dataset")
    x_range = plot.x_range or _padded(float(data.x.min()), float(data.x.max()))
    y_range = plot.y_range or _padded(float(data.y.min()), float(data.y.max()))
    frame = _Frame(plot, x_range, y_range)
    lines: list[tuple[float, float]]
    if isinstance(fit, OlsFit):
        lines = [(fit.slope, fit.intercept)]
        opacity = 1.0
    else:
        lines = list(fit.lines)
        opacity = plot.line_opacity
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{plot.width}" height="{plot.height}" '
        f'viewBox="0 0 {plot.width} {plot.height}">',
        "<defs>",
        f'<clipPath id="plotarea"><rect x="{_px(frame.left)}" y="{_px(frame.top)}" '
        f'width="{_px(frame.right - frame.left)}" height="{_px(frame.bottom - frame.top)}"/>'
        "</clipPath>",
        "</defs>",
        f'<rect width="{plot.width}" height="{plot.height}" fill="white"/>',
    ]
    parts.extend(_axes(frame, x_label, y_label))
    parts.append('<g clip-path="url(#plotarea)">')
    for slope, intercept in lines:
        parts.append(_line_path(frame, slope, intercept, opacity))
    parts.append("</g>")
    for point in data.points:
        cx, cy = frame.x(point.x), frame.y(point.y)
        parts.append(
            f'<circle cx="{_px(cx)}" cy="{_px(cy)}" r="{plot.point_radius:g}" '
            f'fill="steelblue"/>'
        )
        parts.append(
            f'<text x="{_px(cx + plot.point_radius + 2)}" y="{_px(cy - 4)}" '
            f'font-size="10">{escape(point.label)}</text>'
        )
    parts.append("</svg>")
    fh, owned = _open_text(sink, "w")
    try:
        fh.write("\n".join(parts) + "\n")
    finally:
        if owned:
            fh.close()


def render_marginals_svg(
    chains: Chains,
    plot: PlotSpec,
    sink: str | Path | IO[str],
    params: Sequence[str] = ("a", "b"),
    bins: int = 30,
) -> None:
    """Side-by-side marginal histograms with a mean line per parameter.

    Bars are ``rect`` elements and the mean markers ``line`` elements, so
    these figures never interfere with path/circle counts elsewhere.
    """
    if chains.total_draws == 0:
        raise ValueError("cannot plot empty chains")
    panel_w = plot.width / len(params)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{plot.width}" height="{plot.height}" '
        f'viewBox="0 0 {plot.width} {plot.height}">',
        f'<rect width="{plot.width}" height="{plot.height}" fill="white"/>',
    ]
    for i, name in enumerate(params):
        values = chains.pooled(name)
        counts, edges = np.histogram(values, bins=bins)
        top = float(counts.max()) if counts.max() > 0 else 1.0
        left = i * panel_w + _MARGIN_LEFT
        right = (i + 1) * panel_w - _MARGIN_RIGHT
        bottom = plot.height - _MARGIN_BOTTOM
        height = bottom - _MARGIN_TOP
        lo, hi = float(edges[0]), float(edges[-1])
        span = hi - lo if hi > lo else 1.0
        for k, count in enumerate(counts):
            x0 = left + (edges[k] - lo) / span * (right - left)
            x1 = left + (edges[k + 1] - lo) / span * (right - left)
            h = count / top * height
            parts.append(
                f'<rect x="{_px(x0)}" y="{_px(bottom - h)}" '
                f'width="{_px(max(x1 - x0 - 0.5, 0.5))}" height="{_px(h)}" '
                f'fill="steelblue"/>'
            )
        mean_x = left + (float(values.mean()) - lo) / span * (right - left)
        parts.append(
            f'<line x1="{_px(mean_x)}" y1="{_px(_MARGIN_TOP)}" '
            f'x2="{_px(mean_x)}" y2="{_px(bottom)}" stroke="black" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_px((left + right) / 2)}" y="{_px(bottom + 18)}" font-size="13" '
            f'text-anchor="middle">{escape(name)}</text>'
        )
    parts.append("</svg>")
    fh, owned = _open_text(sink, "w")
    try:
        fh.write("\n".join(parts) + "\n")
    finally:
        if owned:
            fh.close()
