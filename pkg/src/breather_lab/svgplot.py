"""Minimal native SVG line/scatter plots.

Plots are a convenience; CSV files are the data contract.  Output is fully
deterministic (fixed formatting, no timestamps).
"""

from __future__ import annotations

import math

import numpy as np

_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
           "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]

_W, _H = 720, 480
_ML, _MR, _MT, _MB = 72, 20, 36, 52


def _nice_ticks(lo, hi, n=5):
    if not math.isfinite(lo) or not math.isfinite(hi) or hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    for m in (1.0, 2.0, 5.0, 10.0):
        if raw <= m * mag:
            step = m * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-12 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _log_ticks(lo, hi):
    lo_d = math.floor(math.log10(lo))
    hi_d = math.ceil(math.log10(hi))
    return [10.0 ** d for d in range(int(lo_d), int(hi_d) + 1)]


def _fmt(v):
    return f"{v:.6g}"


class _Axis:
    def __init__(self, lo, hi, pix_lo, pix_hi, log=False):
        self.log = log
        if log:
            lo, hi = math.log10(lo), math.log10(hi)
        if hi <= lo:
            hi = lo + 1.0
        pad = 0.04 * (hi - lo)
        self.lo, self.hi = lo - pad, hi + pad
        self.pix_lo, self.pix_hi = pix_lo, pix_hi

    def to_pix(self, v):
        v = math.log10(v) if self.log else v
        frac = (v - self.lo) / (self.hi - self.lo)
        return self.pix_lo + frac * (self.pix_hi - self.pix_lo)


def line_plot(path, curves, title="", xlabel="", ylabel="",
              logx=False, logy=False):
    """Write an SVG plot of the given curves.

    Each curve is a dict with keys x, y (sequences), label (str), and
    optional marker (bool, scatter points) / line (bool, default True).
    Non-finite points (and non-positive ones on log axes) are dropped.
    """
    cleaned = []
    for i, c in enumerate(curves):
        x = np.asarray(c["x"], dtype=float)
        y = np.asarray(c["y"], dtype=float)
        keep = np.isfinite(x) & np.isfinite(y)
        if logx:
            keep &= x > 0
        if logy:
            keep &= y > 0
        if not np.any(keep):
            continue
        cleaned.append({"x": x[keep], "y": y[keep],
                        "label": c.get("label", f"series {i}"),
                        "marker": c.get("marker", False),
                        "line": c.get("line", True),
                        "color": c.get("color", _COLORS[i % len(_COLORS)])})
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
             f'viewBox="0 0 {_W} {_H}" font-family="sans-serif" font-size="12">',
             f'<rect width="{_W}" height="{_H}" fill="white"/>']
    if not cleaned:
        parts.append(f'<text x="{_W/2}" y="{_H/2}" text-anchor="middle">no finite data</text>')
        parts.append("</svg>")
        with open(path, "w") as fh:
            fh.write("\n".join(parts))
        return

    x_all = np.concatenate([c["x"] for c in cleaned])
    y_all = np.concatenate([c["y"] for c in cleaned])
    ax = _Axis(float(x_all.min()), float(x_all.max()), _ML, _W - _MR, log=logx)
    ay = _Axis(float(y_all.min()), float(y_all.max()), _H - _MB, _MT, log=logy)

    # frame and ticks
    parts.append(f'<rect x="{_ML}" y="{_MT}" width="{_W-_ML-_MR}" height="{_H-_MT-_MB}" '
                 'fill="none" stroke="#404040"/>')
    xt = _log_ticks(x_all.min(), x_all.max()) if logx else _nice_ticks(x_all.min(), x_all.max())
    yt = _log_ticks(y_all.min(), y_all.max()) if logy else _nice_ticks(y_all.min(), y_all.max())
    for t in xt:
        px = ax.to_pix(t)
        if _ML - 1 <= px <= _W - _MR + 1:
            parts.append(f'<line x1="{px:.1f}" y1="{_H-_MB}" x2="{px:.1f}" y2="{_H-_MB+5}" stroke="#404040"/>')
            parts.append(f'<text x="{px:.1f}" y="{_H-_MB+18}" text-anchor="middle">{_fmt(t)}</text>')
    for t in yt:
        py = ay.to_pix(t)
        if _MT - 1 <= py <= _H - _MB + 1:
            parts.append(f'<line x1="{_ML-5}" y1="{py:.1f}" x2="{_ML}" y2="{py:.1f}" stroke="#404040"/>')
            parts.append(f'<text x="{_ML-8}" y="{py+4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    if title:
        parts.append(f'<text x="{_W/2}" y="{_MT-14}" text-anchor="middle" font-size="14">{title}</text>')
    if xlabel:
        parts.append(f'<text x="{(_ML+_W-_MR)/2}" y="{_H-14}" text-anchor="middle">{xlabel}</text>')
    if ylabel:
        parts.append(f'<text x="16" y="{(_MT+_H-_MB)/2}" text-anchor="middle" '
                     f'transform="rotate(-90 16 {(_MT+_H-_MB)/2})">{ylabel}</text>')

    for c in cleaned:
        px = [ax.to_pix(v) for v in c["x"]]
        py = [ay.to_pix(v) for v in c["y"]]
        if c["line"] and len(px) > 1:
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
            parts.append(f'<polyline points="{pts}" fill="none" stroke="{c["color"]}" stroke-width="1.5"/>')
        if c["marker"] or len(px) == 1:
            for a, b in zip(px, py):
                parts.append(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="3" fill="{c["color"]}"/>')

    # legend
    ly = _MT + 14
    for c in cleaned:
        parts.append(f'<line x1="{_W-_MR-150}" y1="{ly-4}" x2="{_W-_MR-126}" y2="{ly-4}" '
                     f'stroke="{c["color"]}" stroke-width="2"/>')
        parts.append(f'<text x="{_W-_MR-120}" y="{ly}">{c["label"]}</text>')
        ly += 16
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
