"""Static SVG line plots of a target and its approximants (no plotting library)."""

from __future__ import annotations

from typing import Callable, Optional, Sequence, Union
from xml.sax.saxutils import escape

import numpy as np

from .metrics import Grid
from .targets import TargetFunction

WIDTH, HEIGHT = 640, 400
MARGIN = dict(left=70, right=160, top=30, bottom=45)
COLORS = ("#000000", "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")

Curve = Union[Callable, tuple[str, Callable]]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick(v: float) -> str:
    return f"{v:.3g}"


def _samples(fn: Callable, xs: np.ndarray) -> np.ndarray:
    with np.errstate(all="ignore"):
        try:
            ys = np.asarray(fn(xs), dtype=float)
        except (ValueError, ArithmeticError):
            ys = np.array([float(fn(x)) for x in xs])
    return np.broadcast_to(ys, xs.shape)


def _y_range(curves: Sequence[np.ndarray]) -> tuple[float, float]:
    finite = np.concatenate([y[np.isfinite(y)] for y in curves]) if curves else np.zeros(0)
    if finite.size == 0:
        return -1.0, 1.0
    lo, hi = float(finite.min()), float(finite.max())
    if hi - lo > 1e6 * max(1.0, float(np.median(np.abs(finite)))):
        # unbounded targets: clip to the bulk of the data
        lo, hi = (float(v) for v in np.percentile(finite, [2, 98]))
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def emit_plot(f: TargetFunction, approximants: Sequence[Curve] = (),
              grid: Optional[Grid] = None, title: Optional[str] = None) -> str:
    """SVG with the target and each approximant as one polyline apiece.

    Approximants are callables or ``(label, callable)`` pairs.  The output is a
    pure function of the inputs, so identical calls give identical bytes.
    """
    grid = grid or Grid(f.domain, 501)
    xs = grid.abscissae()
    named = [(f.id, f)]
    for i, a in enumerate(approximants):
        named.append(a if isinstance(a, tuple) else (f"approximant {i + 1}", a))
    ys = [_samples(fn, xs) for _, fn in named]
    y0, y1 = _y_range(ys)
    x0, x1 = grid.domain
    pw = WIDTH - MARGIN["left"] - MARGIN["right"]
    ph = HEIGHT - MARGIN["top"] - MARGIN["bottom"]

    def px(x):
        return MARGIN["left"] + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN["top"] + (y1 - np.clip(y, y0, y1)) / (y1 - y0) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2:.0f}" y="18" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title or f.id)}</text>',
    ]
    # axes box and ticks
    left, top = MARGIN["left"], MARGIN["top"]
    out.append(f'<rect x="{left}" y="{top}" width="{pw}" height="{ph}" fill="none" '
               f'stroke="#888888"/>')
    for t in np.linspace(0.0, 1.0, 5):
        xv, yv = x0 + t * (x1 - x0), y0 + t * (y1 - y0)
        X, Y = px(xv), py(yv)
        out.append(f'<line x1="{_fmt(X)}" y1="{top + ph}" x2="{_fmt(X)}" y2="{top + ph + 5}" '
                   f'stroke="#888888"/>')
        out.append(f'<text x="{_fmt(X)}" y="{top + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{_tick(xv)}</text>')
        out.append(f'<line x1="{left - 5}" y1="{_fmt(Y)}" x2="{left}" y2="{_fmt(Y)}" '
                   f'stroke="#888888"/>')
        out.append(f'<text x="{left - 8}" y="{_fmt(Y + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{_tick(yv)}</text>')
    # curves
    for i, ((label, _), y) in enumerate(zip(named, ys)):
        ok = np.isfinite(y)
        pts = " ".join(f"{_fmt(px(a))},{_fmt(py(b))}" for a, b in zip(xs[ok], y[ok]))
        color = COLORS[i % len(COLORS)]
        dash = ' stroke-dasharray="6,3"' if i else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} '
                   f'points="{pts}"/>')
        ly = top + 12 + 18 * i
        lx = left + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly}" x2="{lx + 24}" y2="{ly}" stroke="{color}" '
                   f'stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{lx + 30}" y="{ly + 4}" font-family="sans-serif" '
                   f'font-size="11">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
