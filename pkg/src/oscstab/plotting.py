"""Static SVG time-series plots, written byte-deterministically.

One stacked panel per state component plus one for the state norm.  The
writer avoids every source of nondeterminism (timestamps, hashes, object
ids); identical trajectories produce identical files.
"""

from __future__ import annotations

import math

import numpy as np

from .simulator import Trajectory

PANEL_W = 880
PANEL_H = 96
MARGIN_L = 64
MARGIN_R = 16
MARGIN_T = 28
PANEL_GAP = 18
MAX_POINTS = 1600

STROKE = "#1f6fb2"
NORM_STROKE = "#b23a1f"
AXIS = "#444444"
GRID = "#dddddd"


def _fmt(v: float) -> str:
    return f"{v:.3f}"


def _label(v: float) -> str:
    return f"{v:.5g}"


def _downsample(times: np.ndarray, values: np.ndarray):
    stride = max(1, int(math.ceil(len(times) / MAX_POINTS)))
    idx = np.arange(0, len(times), stride)
    if idx[-1] != len(times) - 1:
        idx = np.append(idx, len(times) - 1)
    return times[idx], values[idx]


def _panel(svg, times, values, top, label, stroke):
    t0, t1 = float(times[0]), float(times[-1])
    span_t = (t1 - t0) or 1.0
    vmin, vmax = float(values.min()), float(values.max())
    if vmax - vmin < 1e-12:
        pad = max(1e-12, abs(vmax) * 0.1, 0.5)
        vmin, vmax = vmin - pad, vmax + pad
    span_v = vmax - vmin

    def xp(t):
        return MARGIN_L + (t - t0) / span_t * PANEL_W

    def yp(v):
        return top + PANEL_H - (v - vmin) / span_v * PANEL_H

    svg.append(
        f'<rect x="{MARGIN_L}" y="{top}" width="{PANEL_W}" height="{PANEL_H}" '
        f'fill="none" stroke="{AXIS}" stroke-width="1"/>'
    )
    if vmin < 0.0 < vmax:
        y0 = yp(0.0)
        svg.append(
            f'<line x1="{MARGIN_L}" y1="{_fmt(y0)}" x2="{MARGIN_L + PANEL_W}" '
            f'y2="{_fmt(y0)}" stroke="{GRID}" stroke-width="1"/>'
        )
    ts, vs = _downsample(times, values)
    pts = " ".join(f"{_fmt(xp(t))},{_fmt(yp(v))}" for t, v in zip(ts, vs))
    svg.append(
        f'<polyline points="{pts}" fill="none" stroke="{stroke}" stroke-width="1.2"/>'
    )
    svg.append(
        f'<text x="{MARGIN_L - 6}" y="{top + 10}" text-anchor="end" '
        f'font-size="10" fill="{AXIS}">{_label(vmax)}</text>'
    )
    svg.append(
        f'<text x="{MARGIN_L - 6}" y="{top + PANEL_H}" text-anchor="end" '
        f'font-size="10" fill="{AXIS}">{_label(vmin)}</text>'
    )
    svg.append(
        f'<text x="{MARGIN_L + 4}" y="{top + 12}" font-size="11" fill="{AXIS}">{label}</text>'
    )


def plot_trajectory_svg(traj: Trajectory, path, title: str = "") -> None:
    n = traj.states.shape[1]
    panels = n + 1
    height = MARGIN_T + panels * (PANEL_H + PANEL_GAP) + 24
    width = MARGIN_L + PANEL_W + MARGIN_R
    svg = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        svg.append(
            f'<text x="{MARGIN_L}" y="18" font-size="13" fill="{AXIS}">{title}</text>'
        )
    times = traj.times
    for i in range(n):
        top = MARGIN_T + i * (PANEL_H + PANEL_GAP)
        _panel(svg, times, traj.states[:, i], top, f"x{i + 1}(t)", STROKE)
    top = MARGIN_T + n * (PANEL_H + PANEL_GAP)
    _panel(svg, times, traj.norms(), top, "|x(t)|", NORM_STROKE)
    t0, t1 = float(times[0]), float(times[-1])
    base = MARGIN_T + panels * (PANEL_H + PANEL_GAP)
    svg.append(
        f'<text x="{MARGIN_L}" y="{base + 8}" font-size="10" fill="{AXIS}">t = {_label(t0)}</text>'
    )
    svg.append(
        f'<text x="{MARGIN_L + PANEL_W}" y="{base + 8}" text-anchor="end" '
        f'font-size="10" fill="{AXIS}">t = {_label(t1)}</text>'
    )
    svg.append("</svg>")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(svg) + "\n")
