"""Self-contained SVG rendering of reliability diagrams and curves.

Hand-rolled on purpose: no font or style dependencies, and byte-identical
output for identical inputs, which the command line's reproducibility
contract requires.  Coordinates are written with two decimals and data
labels with four significant digits.
"""

from __future__ import annotations

import numpy as np

from .diagrams import Curve, CurveBand, ReliabilityDiagram

_W, _H = 480, 480
_ML, _MR, _MT, _MB = 64, 20, 44, 56

_STYLE = {
    "frame": 'fill="none" stroke="#000000" stroke-width="1"',
    "diag": 'fill="none" stroke="#888888" stroke-width="1" stroke-dasharray="5,4"',
    "curve": 'fill="none" stroke="#c23b22" stroke-width="2" stroke-linejoin="round"',
    "band": 'fill="#a6cee3" fill-opacity="0.55" stroke="none"',
    "hist": 'fill="#b0b0b0" stroke="#707070" stroke-width="0.5"',
    "tick": 'stroke="#000000" stroke-width="1"',
}


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _num(v: float) -> str:
    return f"{v:.4g}"


class _Frame:
    """Maps data coordinates into the fixed plot rectangle."""

    def __init__(self, x_range, y_range):
        self.x0, self.x1 = x_range
        self.y0, self.y1 = y_range
        if self.x1 <= self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 <= self.y0:
            self.y1 = self.y0 + 1.0

    def px(self, x):
        return _ML + (x - self.x0) / (self.x1 - self.x0) * (_W - _ML - _MR)

    def py(self, y):
        return _H - _MB - (y - self.y0) / (self.y1 - self.y0) * (_H - _MT - _MB)

    def point(self, x, y) -> str:
        return f"{_fmt(self.px(x))},{_fmt(self.py(y))}"


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    return np.linspace(lo, hi, count)


def _axes(parts: list, frame: _Frame, xlabel: str, ylabel: str):
    parts.append(
        f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" height="{_H - _MT - _MB}" {_STYLE["frame"]}/>'
    )
    for t in _ticks(frame.x0, frame.x1):
        px = _fmt(frame.px(t))
        parts.append(f'<line x1="{px}" y1="{_H - _MB}" x2="{px}" y2="{_H - _MB + 5}" {_STYLE["tick"]}/>')
        parts.append(
            f'<text x="{px}" y="{_H - _MB + 20}" font-size="12" text-anchor="middle">{_num(t)}</text>'
        )
    for t in _ticks(frame.y0, frame.y1):
        py = _fmt(frame.py(t))
        parts.append(f'<line x1="{_ML - 5}" y1="{py}" x2="{_ML}" y2="{py}" {_STYLE["tick"]}/>')
        parts.append(
            f'<text x="{_ML - 8}" y="{py}" font-size="12" text-anchor="end" dominant-baseline="middle">{_num(t)}</text>'
        )
    parts.append(
        f'<text x="{(_ML + _W - _MR) / 2:.1f}" y="{_H - 12}" font-size="13" text-anchor="middle">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(_MT + _H - _MB) / 2:.1f}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 16 {(_MT + _H - _MB) / 2:.1f})">{ylabel}</text>'
    )


def _polyline(frame: _Frame, xs, ys, style: str) -> str:
    pts = " ".join(frame.point(x, y) for x, y in zip(xs, ys))
    return f'<polyline points="{pts}" {style}/>'


def _band_polygon(frame: _Frame, band: CurveBand) -> str:
    at = np.asarray(band.at, dtype=float)
    xs = np.concatenate([at, at[::-1]])
    ys = np.concatenate([np.asarray(band.upper, dtype=float), np.asarray(band.lower, dtype=float)[::-1]])
    pts = " ".join(frame.point(x, y) for x, y in zip(xs, ys))
    return f'<polygon points="{pts}" {_STYLE["band"]}/>'


def _annotation(parts: list, lines: list[str]):
    x = _ML + 10
    y = _MT + 18
    for line in lines:
        parts.append(f'<text x="{x}" y="{y}" font-size="13" font-family="monospace">{line}</text>')
        y += 16


def _inset_histogram(parts: list, frame: _Frame, values: np.ndarray, bins: int = 12):
    """Small histogram of the forecast values in the lower right corner."""
    counts, edges = np.histogram(values, bins=bins, range=(frame.x0, frame.x1))
    if counts.max() == 0:
        return
    box_h = 0.16 * (_H - _MT - _MB)
    base = _H - _MB - 6
    scale = box_h / counts.max()
    for c, lo, hi in zip(counts, edges[:-1], edges[1:]):
        if c == 0:
            continue
        x0 = frame.px(lo)
        w = max(frame.px(hi) - x0, 0.5)
        h = c * scale
        parts.append(
            f'<rect x="{_fmt(x0)}" y="{_fmt(base - h)}" width="{_fmt(w)}" height="{_fmt(h)}" {_STYLE["hist"]}/>'
        )


def _document(parts: list, title: str) -> str:
    head = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}" font-family="Helvetica,Arial,sans-serif">',
        f'<rect width="{_W}" height="{_H}" fill="#ffffff"/>',
        f'<text x="{_W / 2:.1f}" y="26" font-size="15" text-anchor="middle" font-weight="bold">{title}</text>',
    ]
    return "\n".join(head + parts + ["</svg>"]) + "\n"


_SCORE_LABEL = {"mean": "MSE", "quantile": "QS", "threshold": "BS"}


def render_reliability(diagram: ReliabilityDiagram, title: str | None = None) -> str:
    """Reliability diagram with diagonal, optional band, score annotation
    block, and an inset histogram of the forecast values."""
    px = np.asarray(diagram.points_x, dtype=float)
    py = np.asarray(diagram.points_y, dtype=float)
    xs = [px.min(), px.max(), py.min(), py.max()]
    if diagram.band is not None:
        xs += [float(np.min(diagram.band.lower)), float(np.max(diagram.band.upper))]
    lo, hi = min(xs), max(xs)
    pad = 0.05 * (hi - lo if hi > lo else 1.0)
    frame = _Frame((lo - pad, hi + pad), (lo - pad, hi + pad))

    parts: list[str] = []
    parts.append(_polyline(frame, [frame.x0, frame.x1], [frame.x0, frame.x1], _STYLE["diag"]))
    if diagram.band is not None:
        parts.append(_band_polygon(frame, diagram.band))
    parts.append(_polyline(frame, px, py, _STYLE["curve"]))
    for x, y in zip(px, py):
        parts.append(f'<circle cx="{_fmt(frame.px(x))}" cy="{_fmt(frame.py(y))}" r="2.5" fill="#c23b22"/>')
    if diagram.forecasts is not None:
        _inset_histogram(parts, frame, np.asarray(diagram.forecasts, dtype=float))
    _axes(parts, frame, "forecast value", "recalibrated value")

    d = diagram.decomposition
    label = _SCORE_LABEL.get(diagram.functional.kind, "S")
    lines = [f"{label}  {_num(d.score)}", f"MCB {_num(d.mcb)}", f"DSC {_num(d.dsc)}", f"UNC {_num(d.unc)}"]
    if d.r_star is not None:
        lines.append(f"R*  {_num(d.r_star)}")
    _annotation(parts, lines)
    return _document(parts, title or f"reliability diagram ({diagram.functional.label()})")


def render_curve(curve: Curve, band: CurveBand | None = None, title: str = "",
                 xlabel: str = "", ylabel: str = "", annotation: list[str] | None = None) -> str:
    """Unit-square curve plot (PIT or marginal reliability) with diagonal."""
    frame = _Frame((0.0, 1.0), (0.0, 1.0))
    parts: list[str] = []
    parts.append(_polyline(frame, [0.0, 1.0], [0.0, 1.0], _STYLE["diag"]))
    if band is not None:
        parts.append(_band_polygon(frame, band))
    parts.append(_polyline(frame, np.asarray(curve.x, dtype=float), np.asarray(curve.y, dtype=float), _STYLE["curve"]))
    _axes(parts, frame, xlabel, ylabel)
    if annotation:
        _annotation(parts, annotation)
    return _document(parts, title)
