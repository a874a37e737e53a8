"""Monte Carlo consistency resamples, bands, and calibration p-values.

Two hypotheses generate surrogate outcomes for the observed forecasts:

* ``auto`` -- the outcome is a draw from the stated forecast distribution;
  replicate j redraws every outcome from its own forecast CDF.
* ``residual`` -- the point forecast is calibrated up to exchangeable
  residuals independent of the forecast; replicate j resamples the
  residuals with replacement and re-centers them by the empirical shift c,
  so the surrogate pairs are unconditionally calibrated by construction.

Replicate j draws its variates from a dedicated generator spawned from
(seed, j), one variate per observation in data order, so results are pure
functions of the inputs and the seed, independent of scheduling.

Band envelopes use raw order statistics: with q = (1 - level)/2 and k =
ceil(q m), the lower envelope is the k-th smallest and the upper envelope
the k-th largest of the m recalibrated values at each location, without
interpolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._validation import check_xy
from .diagrams import CurveBand
from .distributions import Distribution, functional_of
from .functionals import Functional
from .pav import fit_isotonic
from .scores import unconditional_shift


def _stream(seed: int, *key: int) -> np.random.Generator:
    """Deterministic generator for a (seed, key...) work unit."""
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=tuple(key)))


@dataclass(frozen=True)
class ResampleSet:
    """Forecast values with m surrogate outcome sequences."""

    x: np.ndarray
    replicates: np.ndarray  # shape (m, n)
    hypothesis: str
    seed: int

    @property
    def m(self) -> int:
        return self.replicates.shape[0]


def resample_auto(dists, f: Functional, m: int, seed: int) -> ResampleSet:
    """Surrogate outcomes drawn from each forecast distribution; the
    forecast values are the functional applied to each distribution."""
    if m < 1:
        raise ValueError("m must be at least 1")
    n = len(dists)
    if n == 0:
        raise ValueError("empty input")
    x = np.array([functional_of(d, f) for d in dists])
    u = np.empty((m, n))
    for j in range(m):
        u[j] = _stream(seed, j).random(n)
    reps = np.empty((m, n))
    for i, d in enumerate(dists):
        reps[:, i] = d.sample_from_uniform(u[:, i])
    return ResampleSet(x=x, replicates=reps, hypothesis="auto", seed=int(seed))


def resample_residual(x, y, f: Functional, m: int, seed: int) -> ResampleSet:
    """Surrogate outcomes x_i + r~_i - c from resampled residuals r = y - x."""
    if m < 1:
        raise ValueError("m must be at least 1")
    x, y = check_xy(x, y)
    c = unconditional_shift(x, y, f)
    r = y - x
    n = x.size
    reps = np.empty((m, n))
    for j in range(m):
        idx = _stream(seed, j).integers(0, n, size=n)
        reps[j] = x + r[idx] - c
    return ResampleSet(x=x, replicates=reps, hypothesis="residual", seed=int(seed))


def _order_statistic_rank(level: float, m: int) -> int:
    if not 0.0 < level <= 1.0:
        raise ValueError(f"level must lie in (0, 1], got {level}")
    q = (1.0 - level) / 2.0
    return min(max(int(math.ceil(q * m - 1e-9)), 1), m)


def _envelope(values: np.ndarray, level: float) -> tuple[np.ndarray, np.ndarray]:
    """Pointwise order-statistic envelopes of shape-(m, k) replicate curves."""
    m = values.shape[0]
    k = _order_statistic_rank(level, m)
    srt = np.sort(values, axis=0)
    return srt[k - 1], srt[m - k]


def consistency_band(rs: ResampleSet, f: Functional, level: float) -> CurveBand:
    """Pointwise band of recalibration curves over the resamples.

    Each replicate is recalibrated with the same pool-adjacent-violators
    fit as the observed data; envelopes are taken at the distinct forecast
    values and interpolate linearly in between.
    """
    if rs.m < 2:
        raise ValueError("need at least 2 resamples for a band")
    curves = None
    for j in range(rs.m):
        fit = fit_isotonic(rs.x, rs.replicates[j], f)
        _, vals = fit.diagram_points()
        if curves is None:
            curves = np.empty((rs.m, vals.size))
            locations = fit.diagram_points()[0]
        curves[j] = vals
    lower, upper = _envelope(curves, level)
    return CurveBand(at=locations, lower=lower, upper=upper, level=level)


def mc_pvalue(observed_mcb: float, resampled_mcbs) -> float:
    """Monte Carlo p-value 1 - r/(m+1), with r the count of resampled
    miscalibration values at or below the observed one."""
    mcbs = np.asarray(resampled_mcbs, dtype=float)
    if mcbs.size == 0:
        raise ValueError("need at least one resampled value")
    r = int(np.sum(mcbs <= observed_mcb))
    return 1.0 - r / (mcbs.size + 1.0)


def pit_band(n: int, m: int, level: float, seed: int) -> CurveBand:
    """Band for the PIT reliability diagram under uniformity, from m
    empirical CDFs of n standard uniforms on a fixed grid of 101 levels."""
    if m < 2:
        raise ValueError("need at least 2 resamples for a band")
    if n < 1:
        raise ValueError("n must be at least 1")
    grid = np.linspace(0.0, 1.0, 101)
    curves = np.empty((m, grid.size))
    for j in range(m):
        u = np.sort(_stream(seed, j).random(n))
        curves[j] = np.searchsorted(u, grid, side="right") / n
    lower, upper = _envelope(curves, level)
    return CurveBand(at=grid, lower=lower, upper=upper, level=level)


def marginal_band(dists, y, m: int, level: float, seed: int) -> CurveBand:
    """Band for the marginal reliability diagram under marginal calibration.

    Outcomes are redrawn from the average forecast CDF (a fresh component
    pick and a fresh within-component draw per observation), each
    replicate's outcome ECDF is evaluated at the observed outcomes, and the
    envelopes are taken pointwise.
    """
    if m < 2:
        raise ValueError("need at least 2 resamples for a band")
    y = np.asarray(y, dtype=float)
    n = y.size
    if len(dists) != n or n == 0:
        raise ValueError("dists and y must be nonempty and of equal length")
    uniq = np.unique(y)
    fbar = np.zeros_like(uniq)
    for d in dists:
        fbar += np.asarray(d.cdf(uniq), dtype=float)
    fbar /= n
    curves = np.empty((m, uniq.size))
    for j in range(m):
        rng = _stream(seed, j)
        pick = np.minimum((rng.random(n) * n).astype(int), n - 1)
        inner = rng.random(n)
        draws = np.array([dists[k].sample_from_uniform(u) for k, u in zip(pick, inner)])
        draws.sort()
        curves[j] = np.searchsorted(draws, uniq, side="right") / n
    lower, upper = _envelope(curves, level)
    return CurveBand(at=fbar, lower=lower, upper=upper, level=level)
