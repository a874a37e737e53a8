"""Synthetic forecast scenarios and the toy regression dataset.

The generators produce (forecast distribution, outcome) pairs from a latent
center mu ~ N(0, 1):

* ``perfect`` -- forecast N(mu, 1), outcome N(mu, 1): auto-calibrated.
* ``unconditional`` -- forecast N(0, sqrt(2)), the outcome's marginal law.
* ``unfocused`` -- an equal-weight mixture of N(mu, 1) and N(mu + eta, 1)
  with eta = +/- eta0: probabilistically but not marginally calibrated.
* ``lopsided`` -- the two-branch reweighted normal with delta = +/- delta0:
  marginally but not probabilistically calibrated.
* ``piecewise_uniform`` -- mixtures of uniforms on [mu, mu+1], [mu+1, mu+2],
  [mu+2, mu+3]; forecast and outcome weights are tied to a shared latent
  index drawn uniformly from three fixed weight tuples, and mu ~ N(0, c^2).

Each observation consumes a fixed number of variates in a fixed order
(latent center, scenario auxiliary, outcome), so output is a pure function
of the seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_xy
from .distributions import Distribution, Lopsided, Normal, NormalMixture, UniformMixture

SCENARIO_KINDS = ("perfect", "unconditional", "unfocused", "lopsided", "piecewise_uniform")

# (forecast weights; outcome weights) tuples of the piecewise uniform scenario
_PU_FORECAST = np.array([
    [1 / 2, 1 / 4, 1 / 4],
    [1 / 4, 1 / 2, 1 / 4],
    [1 / 4, 1 / 4, 1 / 2],
])
_PU_OUTCOME = np.array([
    [5 / 10, 1 / 10, 4 / 10],
    [1 / 10, 8 / 10, 1 / 10],
    [4 / 10, 1 / 10, 5 / 10],
])


@dataclass(frozen=True)
class Scenario:
    """A named generator with its parameters (defaults match the customary
    illustration settings eta0 = 1.5, delta0 = 0.7, c = 0.5)."""

    kind: str
    eta0: float = 1.5
    delta0: float = 0.7
    c: float = 0.5

    def __post_init__(self):
        if self.kind not in SCENARIO_KINDS:
            raise ValueError(f"unknown scenario kind {self.kind!r}")
        if self.kind == "unfocused" and not self.eta0 > 0:
            raise ValueError("eta0 must be positive")
        if self.kind == "lopsided" and not 0.0 < self.delta0 < 1.0:
            raise ValueError("delta0 must lie in (0, 1)")
        if self.kind == "piecewise_uniform" and not self.c > 0:
            raise ValueError("latent scale c must be positive")


def gen_scenario(scenario: Scenario | str, n: int, seed: int) -> tuple[list[Distribution], np.ndarray]:
    """Draw n (forecast distribution, outcome) pairs for the scenario.

    Returns the forecasts as a list and the outcomes as an array, aligned by
    index.
    """
    if isinstance(scenario, str):
        scenario = Scenario(scenario)
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed))

    if scenario.kind == "piecewise_uniform":
        mu = scenario.c * rng.standard_normal(n)
        iota = rng.integers(0, 3, size=n)
        u = rng.random(n)
        dists: list[Distribution] = []
        y = np.empty(n)
        for i in range(n):
            breaks = mu[i] + np.arange(4.0)
            dists.append(UniformMixture(_PU_FORECAST[iota[i]], breaks))
            y[i] = UniformMixture(_PU_OUTCOME[iota[i]], breaks).sample_from_uniform(u[i])
        return dists, y

    mu = rng.standard_normal(n)
    if scenario.kind == "perfect":
        dists = [Normal(m, 1.0) for m in mu]
    elif scenario.kind == "unconditional":
        dists = [Normal(0.0, np.sqrt(2.0)) for _ in range(n)]
    elif scenario.kind == "unfocused":
        eta = scenario.eta0 * np.where(rng.random(n) < 0.5, 1.0, -1.0)
        dists = [
            NormalMixture([m, m + e], [1.0, 1.0], [0.5, 0.5])
            for m, e in zip(mu, eta)
        ]
    else:  # lopsided
        delta = scenario.delta0 * np.where(rng.random(n) < 0.5, 1.0, -1.0)
        dists = [Lopsided(m, d) for m, d in zip(mu, delta)]
    y = mu + rng.standard_normal(n)
    return dists, y


def kvalseth_data() -> tuple[np.ndarray, np.ndarray]:
    """The nine-point toy regression dataset of Kvalseth (1985, Figure 1)."""
    x = np.array([1.0, 2.0, 4.0, 6.0, 8.0, 10.0, 11.0, 12.0, 14.0])
    y = np.array([4.0, 5.0, 6.0, 9.0, 10.0, 11.0, 13.0, 8.0, 15.0])
    return x, y


def fit_ols(x, y) -> tuple[float, float]:
    """Least squares line via the normal equations; (slope, intercept)."""
    x, y = check_xy(x, y)
    sxx = float(np.sum((x - x.mean()) ** 2))
    if sxx == 0.0:
        raise ValueError("degenerate x: all values equal")
    slope = float(np.sum((x - x.mean()) * (y - y.mean()))) / sxx
    return slope, float(y.mean() - slope * x.mean())


def fit_lad(x, y) -> tuple[float, float]:
    """Least absolute deviations line; (slope, intercept).

    Some optimal LAD line passes through two data points, so all lines
    through pairs with distinct x are enumerated and scored by total
    absolute error.  Among the minimizers (the optimum is often a face of
    the piecewise linear objective) the line with the largest slope is
    returned.
    """
    x, y = check_xy(x, y)
    n = x.size
    best: tuple[float, float] | None = None
    best_err = np.inf
    for i in range(n):
        for j in range(i + 1, n):
            if x[i] == x[j]:
                continue
            slope = (y[j] - y[i]) / (x[j] - x[i])
            intercept = y[i] - slope * x[i]
            err = float(np.sum(np.abs(y - (intercept + slope * x))))
            if err < best_err * (1.0 - 1e-12):
                best, best_err = (slope, intercept), err
            elif best is not None and err <= best_err * (1.0 + 1e-12) and slope > best[0]:
                best = (slope, intercept)
    if best is None:
        raise ValueError("degenerate x: all values equal")
    return best
