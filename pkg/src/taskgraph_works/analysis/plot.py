"""Self-contained SVG scatter plots with weight-proportional markers."""

from __future__ import annotations

import csv
import logging
import math
from collections.abc import Sequence
from pathlib import Path
from xml.sax.saxutils import escape

from .. import __version__
from ..errors import IoFailure, LengthMismatch, TaskGraphError
from .stats import weighted_pearson

log = logging.getLogger(__name__)

WIDTH, HEIGHT = 640, 480
MARGIN = 60
MAX_RADIUS = 14.0


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    return [lo + (hi - lo) * k / (n - 1) for k in range(n)]


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def emit_scatter(
    x: Sequence[float],
    y: Sequence[float],
    weights: Sequence[float],
    labels: Sequence[str],
    path: str | Path,
    *,
    x_label: str = "x",
    y_label: str = "y",
    title: str = "",
) -> Path:
    """Write ``path`` (SVG) and a companion CSV of the plotted points.

    Marker area is proportional to weight.  The weighted correlation is
    printed in the corner whenever it is defined.
    """
    n = len(x)
    if not (len(y) == len(weights) == len(labels) == n):
        raise LengthMismatch("x, y, weights and labels must have equal lengths")
    path = Path(path)
    if n == 0:
        log.warning("scatter %s has no points; writing axes only", path.name)

    if n:
        x_lo, x_hi = min(x), max(x)
        y_lo, y_hi = min(y), max(y)
    else:
        x_lo = y_lo = 0.0
        x_hi = y_hi = 1.0
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    w_max = max(weights, default=0.0)

    def px(v: float) -> float:
        return MARGIN + (v - x_lo) / (x_hi - x_lo) * (WIDTH - 2 * MARGIN)

    def py(v: float) -> float:
        return HEIGHT - MARGIN - (v - y_lo) / (y_hi - y_lo) * (HEIGHT - 2 * MARGIN)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f"<!-- generator: taskgraph_works {__version__} -->",
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<g id="axes" stroke="black" stroke-width="1">'
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" y2="{HEIGHT - MARGIN}"/>'
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" y2="{HEIGHT - MARGIN}"/></g>',
    ]
    out.append('<g id="ticks" font-family="sans-serif" font-size="10">')
    for t in _ticks(x_lo, x_hi):
        out.append(f'<text x="{_fmt(px(t))}" y="{HEIGHT - MARGIN + 16}" text-anchor="middle">{t:.3g}</text>')
    for t in _ticks(y_lo, y_hi):
        out.append(f'<text x="{MARGIN - 6}" y="{_fmt(py(t) + 3)}" text-anchor="end">{t:.3g}</text>')
    out.append("</g>")
    out.append(
        f'<text x="{WIDTH / 2}" y="{HEIGHT - 15}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="12">{escape(x_label)}</text>'
    )
    out.append(
        f'<text x="15" y="{HEIGHT / 2}" text-anchor="middle" font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 15 {HEIGHT / 2})">{escape(y_label)}</text>'
    )
    if title:
        out.append(
            f'<text x="{WIDTH / 2}" y="25" text-anchor="middle" font-family="sans-serif" '
            f'font-size="14">{escape(title)}</text>'
        )

    out.append('<g id="points" fill="steelblue" fill-opacity="0.5" stroke="navy" stroke-width="0.5">')
    for xi, yi, wi, label in zip(x, y, weights, labels):
        r = MAX_RADIUS * math.sqrt(wi / w_max) if w_max > 0 else 0.0
        out.append(
            f'<circle cx="{_fmt(px(xi))}" cy="{_fmt(py(yi))}" r="{r:.4f}"><title>{escape(str(label))}</title></circle>'
        )
    out.append("</g>")

    if n >= 2:
        try:
            corr = weighted_pearson(x, y, weights)
            out.append(
                f'<text x="{WIDTH - MARGIN}" y="{MARGIN - 10}" text-anchor="end" font-family="sans-serif" '
                f'font-size="12">weighted r = {corr:.3f}</text>'
            )
        except TaskGraphError:
            pass
    out.append("</svg>")

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(out) + "\n", encoding="utf-8")
        with open(path.with_suffix(".csv"), "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["label", "x", "y", "weight"])
            for row in zip(labels, x, y, weights):
                writer.writerow([row[0], repr(float(row[1])), repr(float(row[2])), repr(float(row[3]))])
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc
    return path
