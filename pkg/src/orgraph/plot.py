"""Self-contained SVG log-log scatter plots with a fitted power law."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from .harness import ScalingFit, fit_scaling

WIDTH, HEIGHT = 640, 440
MARGIN = 60


def _ticks(lo: float, hi: float) -> list[int]:
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def loglog_svg(rows: Sequence[dict[str, object]], x: str, y: str, title: str = "") -> str:
    """Render ``y`` against ``x`` on log10 axes plus the OLS line from ``fit_scaling``."""
    pts = [(float(r[x]), float(r[y])) for r in rows if r.get(x) not in ("", None) and r.get(y) not in ("", None)]
    pts = [(px, py) for px, py in pts if px > 0 and py > 0]
    if not pts:
        raise ValueError(f"no positive ({x}, {y}) values to plot")
    fit: ScalingFit | None = fit_scaling([{x: px, y: py} for px, py in pts], x, y) if len(pts) >= 3 else None
    lx = [math.log10(px) for px, _ in pts]
    ly = [math.log10(py) for _, py in pts]
    x0, x1 = min(lx), max(lx)
    y0, y1 = min(ly), max(ly)
    if x1 - x0 < 1e-9:
        x0, x1 = x0 - 0.5, x1 + 0.5
    if y1 - y0 < 1e-9:
        y0, y1 = y0 - 0.5, y1 + 0.5
    pad_x, pad_y = 0.05 * (x1 - x0), 0.05 * (y1 - y0)
    x0, x1, y0, y1 = x0 - pad_x, x1 + pad_x, y0 - pad_y, y1 + pad_y

    def sx(v: float) -> float:
        return MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2 * MARGIN)

    def sy(v: float) -> float:
        return HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2 * MARGIN)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}" stroke="black"/>',
    ]
    for t in _ticks(x0, x1):
        if x0 <= t <= x1:
            px = sx(t)
            out.append(f'<line x1="{px:.2f}" y1="{HEIGHT - MARGIN}" x2="{px:.2f}" y2="{HEIGHT - MARGIN + 5}" stroke="black"/>')
            out.append(f'<text x="{px:.2f}" y="{HEIGHT - MARGIN + 18}" text-anchor="middle">1e{t}</text>')
    for t in _ticks(y0, y1):
        if y0 <= t <= y1:
            py = sy(t)
            out.append(f'<line x1="{MARGIN - 5}" y1="{py:.2f}" x2="{MARGIN}" y2="{py:.2f}" stroke="black"/>')
            out.append(f'<text x="{MARGIN - 8}" y="{py + 4:.2f}" text-anchor="end">1e{t}</text>')
    for vx, vy in zip(lx, ly):
        out.append(f'<circle cx="{sx(vx):.2f}" cy="{sy(vy):.2f}" r="3.5" fill="#1f77b4"/>')
    if fit is not None:
        # the fit is in natural logs; slope is base independent
        c = fit.intercept / math.log(10)
        xa, xb = min(lx), max(lx)
        out.append(
            f'<line x1="{sx(xa):.2f}" y1="{sy(fit.slope * xa + c):.2f}" x2="{sx(xb):.2f}" '
            f'y2="{sy(fit.slope * xb + c):.2f}" stroke="#d62728" stroke-width="1.5"/>'
        )
        label = f"slope {fit.slope:.3f}, r^2 {fit.r2:.3f}"
        out.append(f'<text x="{WIDTH - MARGIN}" y="{MARGIN - 10}" text-anchor="end" fill="#d62728">{escape(label)}</text>')
    out.append(f'<text x="{WIDTH / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(x)}</text>')
    out.append(f'<text x="15" y="{HEIGHT / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 15 {HEIGHT / 2:.0f})">{escape(y)}</text>')
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 10}">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_loglog_svg(path: str | Path, rows: Sequence[dict[str, object]], x: str, y: str, title: str = "") -> None:
    Path(path).write_text(loglog_svg(rows, x, y, title))
