"""Minimal deterministic SVG line plots (no plotting dependency)."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")
WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 78, 20, 36, 52
MAX_POINTS = 2000
LOG_FLOOR = 1e-18


@dataclass
class Series:
    label: str
    x: np.ndarray
    y: np.ndarray
    color: Optional[str] = None
    dashed: bool = False


@dataclass
class HLine:
    y: float
    label: str
    color: str = "#555555"


@dataclass
class Plot:
    title: str
    xlabel: str
    ylabel: str
    series: list[Series] = field(default_factory=list)
    hlines: list[HLine] = field(default_factory=list)
    logy: bool = False
    equal_aspect: bool = False


def _num(x: float) -> str:
    # fixed formatting keeps the output byte-stable across platforms
    return f"{x:.2f}"


def _esc(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _tick_label(v: float) -> str:
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-3:
        return f"{v:.0e}"
    return f"{v:.6g}"


def nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = next(m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw)
    start = math.ceil(lo / step - 1e-9)
    ticks = []
    k = start
    while k * step <= hi + 1e-9 * step:
        ticks.append(round(k * step, 12))
        k += 1
    return ticks


def _decimate(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    n = len(x)
    if n <= MAX_POINTS:
        return x, y
    idx = np.unique(np.linspace(0, n - 1, MAX_POINTS).round().astype(int))
    return x[idx], y[idx]


def _limits(vals: list[np.ndarray], pad: float) -> tuple[float, float]:
    allv = np.concatenate([np.asarray(v, float).ravel() for v in vals]) if vals else np.zeros(1)
    allv = allv[np.isfinite(allv)]
    if allv.size == 0:
        return 0.0, 1.0
    lo, hi = float(allv.min()), float(allv.max())
    if hi - lo < 1e-12 * max(1.0, abs(hi)):
        lo, hi = lo - max(1.0, abs(lo)) * 0.1, hi + max(1.0, abs(hi)) * 0.1
    span = hi - lo
    return lo - pad * span, hi + pad * span


def render(plot: Plot) -> str:
    """Return the SVG document for ``plot`` as a string."""
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    xs = [s.x for s in plot.series]
    ys = [s.y for s in plot.series] + [np.array([h.y]) for h in plot.hlines]
    x0, x1 = _limits(xs, 0.0)
    if plot.logy:
        ys = [np.log10(np.maximum(np.abs(np.asarray(y, float)), LOG_FLOOR)) for y in ys]
        y0, y1 = _limits(ys, 0.02)
        y0, y1 = math.floor(y0), math.ceil(y1)
        if y1 == y0:
            y1 = y0 + 1
    else:
        y0, y1 = _limits(ys, 0.05)
    if plot.equal_aspect:
        sx, sy = (x1 - x0) / pw, (y1 - y0) / ph
        if sx > sy:
            mid, half = 0.5 * (y0 + y1), 0.5 * sx * ph
            y0, y1 = mid - half, mid + half
        else:
            mid, half = 0.5 * (x0 + x1), 0.5 * sy * pw
            x0, x1 = mid - half, mid + half

    def X(v):
        return MARGIN_L + (v - x0) / (x1 - x0) * pw

    def Y(v):
        return MARGIN_T + (1.0 - (v - y0) / (y1 - y0)) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="20" text-anchor="middle" font-size="13">{_esc(plot.title)}</text>',
    ]

    # grid and ticks
    xt = [t for t in nice_ticks(x0, x1) if x0 <= t <= x1]
    if plot.logy:
        stride = max(1, int(math.ceil((y1 - y0) / 8)))
        yt = [float(k) for k in range(int(y0), int(y1) + 1, stride)]
        ylab = [f"1e{int(k)}" for k in yt]
    else:
        yt = [t for t in nice_ticks(y0, y1) if y0 <= t <= y1]
        ylab = [_tick_label(t) for t in yt]
    for t in xt:
        out.append(
            f'<line x1="{_num(X(t))}" y1="{MARGIN_T}" x2="{_num(X(t))}" y2="{MARGIN_T + ph}" stroke="#e6e6e6"/>'
        )
        out.append(
            f'<text x="{_num(X(t))}" y="{MARGIN_T + ph + 16}" text-anchor="middle">{_tick_label(t)}</text>'
        )
    for t, lab in zip(yt, ylab):
        out.append(
            f'<line x1="{MARGIN_L}" y1="{_num(Y(t))}" x2="{MARGIN_L + pw}" y2="{_num(Y(t))}" stroke="#e6e6e6"/>'
        )
        out.append(f'<text x="{MARGIN_L - 6}" y="{_num(Y(t) + 4)}" text-anchor="end">{lab}</text>')
    out.append(
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )
    out.append(
        f'<text x="{MARGIN_L + pw / 2:.0f}" y="{HEIGHT - 12}" text-anchor="middle">{_esc(plot.xlabel)}</text>'
    )
    ylabel = plot.ylabel + (" (log scale)" if plot.logy else "")
    out.append(
        f'<text x="16" y="{MARGIN_T + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_T + ph / 2:.0f})">{_esc(ylabel)}</text>'
    )

    out.append(
        f'<clipPath id="plotarea"><rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}"/></clipPath>'
    )
    legend = []
    for h in plot.hlines:
        yv = math.log10(max(abs(h.y), LOG_FLOOR)) if plot.logy else h.y
        out.append(
            f'<line x1="{MARGIN_L}" y1="{_num(Y(yv))}" x2="{MARGIN_L + pw}" y2="{_num(Y(yv))}" '
            f'stroke="{h.color}" stroke-dasharray="6,4"/>'
        )
        legend.append((h.label, h.color, True))
    for i, s in enumerate(plot.series):
        color = s.color or PALETTE[i % len(PALETTE)]
        x, y = _decimate(np.asarray(s.x, float), np.asarray(s.y, float))
        if plot.logy:
            y = np.log10(np.maximum(np.abs(y), LOG_FLOOR))
        dash = ' stroke-dasharray="4,3"' if s.dashed else ""
        # non-finite entries break the line into separate runs
        run: list[str] = []
        runs = [run]
        for a, b in zip(x, y):
            if math.isfinite(a) and math.isfinite(b):
                run.append(f"{_num(X(a))},{_num(Y(b))}")
            elif run:
                run = []
                runs.append(run)
        for r in runs:
            if len(r) >= 2:
                out.append(
                    f'<polyline clip-path="url(#plotarea)" fill="none" stroke="{color}" '
                    f'stroke-width="1.5"{dash} points="{" ".join(r)}"/>'
                )
        legend.append((s.label, color, s.dashed))

    for i, (label, color, dashed) in enumerate(legend):
        ly = MARGIN_T + 14 + 15 * i
        lx = MARGIN_L + pw - 150
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{lx + 28}" y="{ly}">{_esc(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_plot(plot: Plot, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(render(plot), encoding="utf-8")
    return path


def arrow_segments(points: Sequence[np.ndarray], dirs: Sequence[np.ndarray], scale: float) -> tuple[np.ndarray, np.ndarray]:
    """Interleave segment endpoints with NaN breaks so one polyline draws many arrows."""
    xs, ys = [], []
    for p, d in zip(points, dirs):
        xs += [p[0], p[0] + scale * d[0], np.nan]
        ys += [p[1], p[1] + scale * d[1], np.nan]
    return np.array(xs), np.array(ys)
