"""Reliability curves: isotonic recalibration diagrams, PIT and marginal.

A reliability diagram plots recalibrated against original forecast values;
for a calibrated forecast the curve concentrates on the diagonal.  The
recalibration diagram uses the pool-adjacent-violators fit and carries one
point per distinct forecast value, with linear interpolation in between
(and no extrapolation outside the observed forecast range).  The PIT
reliability diagram is the empirical CDF of the probability integral
transforms, and the marginal reliability diagram plots the outcome ECDF
against the average forecast CDF at the observed outcomes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._validation import as_float_array, check_xy
from .functionals import Functional
from .pav import IsotonicFit, fit_isotonic
from .scores import ScoreDecomposition, decompose


@dataclass(frozen=True)
class CurveBand:
    """Pointwise band between lower and upper envelopes at the x locations."""

    at: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    level: float

    def __post_init__(self):
        if not (len(self.at) == len(self.lower) == len(self.upper)):
            raise ValueError("band arrays must share one length")
        if np.any(np.asarray(self.lower) > np.asarray(self.upper)):
            raise ValueError("band lower envelope exceeds upper envelope")

    def to_dict(self) -> dict:
        return {
            "at": np.asarray(self.at).tolist(),
            "lower": np.asarray(self.lower).tolist(),
            "upper": np.asarray(self.upper).tolist(),
            "level": self.level,
        }


@dataclass(frozen=True)
class Curve:
    """A polyline (x, y), the renderer interpolating linearly in between."""

    x: np.ndarray
    y: np.ndarray

    def to_dict(self) -> dict:
        return {"x": np.asarray(self.x).tolist(), "y": np.asarray(self.y).tolist()}


@dataclass(frozen=True)
class ReliabilityDiagram:
    """Recalibration curve with its score decomposition and optional band."""

    points_x: np.ndarray
    points_y: np.ndarray
    functional: Functional
    decomposition: ScoreDecomposition
    band: CurveBand | None = None
    forecasts: np.ndarray | None = None  # raw forecast values, for histograms

    def to_dict(self) -> dict:
        out = {
            "functional": self.functional.label(),
            "points": {
                "x": np.asarray(self.points_x).tolist(),
                "x_hat": np.asarray(self.points_y).tolist(),
            },
            "decomposition": self.decomposition.to_dict(),
        }
        if self.band is not None:
            out["band"] = self.band.to_dict()
        return out

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def reliability_diagram(x, y, f: Functional, band: CurveBand | None = None,
                        fit: IsotonicFit | None = None) -> ReliabilityDiagram:
    """Build the empirical reliability diagram of forecasts x for outcomes y.

    Ties in x are pooled, so the curve has one point per distinct forecast
    value and is nondecreasing by construction.
    """
    x, y = check_xy(x, y)
    if fit is None:
        fit = fit_isotonic(x, y, f)
    px, py = fit.diagram_points()
    dec = decompose(x, y, f, fit=fit)
    return ReliabilityDiagram(
        points_x=px,
        points_y=py,
        functional=f,
        decomposition=dec,
        band=band,
        forecasts=fit.x_sorted,
    )


def pit_reliability(pits) -> Curve:
    """Empirical CDF of PIT values at their sorted unique levels plus the
    endpoints 0 and 1."""
    p = as_float_array(pits, "pits")
    if np.any(p < 0) or np.any(p > 1):
        raise ValueError("PIT values must lie in [0, 1]")
    s = np.sort(p)
    u = np.unique(np.concatenate([[0.0], s, [1.0]]))
    e = np.searchsorted(s, u, side="right") / s.size
    return Curve(x=u, y=e)


def ks_uniform(pits) -> float:
    """Kolmogorov-Smirnov distance of the PIT sample from the uniform law."""
    s = np.sort(as_float_array(pits, "pits"))
    n = s.size
    grid = np.arange(1, n + 1) / n
    return float(max(np.max(grid - s), np.max(s - (grid - 1.0 / n))))


def marginal_reliability(dists, y, grid=None) -> Curve:
    """Average forecast CDF against the outcome ECDF, a P-P style check of
    marginal calibration.

    By default both are evaluated at the observed outcomes; pass ``grid``
    to evaluate at other locations instead (useful for rendering smooth
    parametric forecast CDFs).
    """
    y = as_float_array(y, "y")
    if len(dists) != y.size:
        raise ValueError("dists and y must have equal length")
    locations = np.unique(y) if grid is None else np.sort(np.asarray(grid, dtype=float))
    fbar = np.zeros_like(locations)
    for d in dists:
        fbar += np.asarray(d.cdf(locations), dtype=float)
    fbar /= len(dists)
    ecdf = np.searchsorted(np.sort(y), locations, side="right") / y.size
    return Curve(x=fbar, y=ecdf)
