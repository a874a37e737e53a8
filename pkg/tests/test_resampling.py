import numpy as np
import pytest

from isocal.distributions import Discrete, Normal
from isocal.functionals import mean, quantile, threshold
from isocal.resampling import (
    consistency_band,
    marginal_band,
    mc_pvalue,
    pit_band,
    resample_auto,
    resample_residual,
)
from isocal.synthetic import gen_scenario


def test_auto_point_masses_reproduce_outcomes():
    y = np.array([1.0, -2.0, 0.5, 3.0, 0.0])
    dists = [Discrete([v], [1.0]) for v in y]
    rs = resample_auto(dists, mean(), m=3, seed=4)
    assert rs.replicates.shape == (3, 5)
    assert np.array_equal(rs.x, y)
    for j in range(3):
        assert np.array_equal(rs.replicates[j], y)


def test_auto_determinism_and_shape():
    dists, _ = gen_scenario("perfect", 20, seed=0)
    a = resample_auto(dists, mean(), m=7, seed=5)
    b = resample_auto(dists, mean(), m=7, seed=5)
    c = resample_auto(dists, mean(), m=7, seed=6)
    assert np.array_equal(a.replicates, b.replicates)
    assert not np.array_equal(a.replicates, c.replicates)
    assert a.hypothesis == "auto"
    assert a.replicates.shape == (7, 20)


def test_residual_trace():
    rs = resample_residual(np.array([0.0, 0.0]), np.array([1.0, 3.0]), mean(), m=50, seed=1)
    assert rs.hypothesis == "residual"
    # c = 2, residuals {1, 3}, surrogates x + r - c
    assert set(np.unique(rs.replicates)).issubset({-1.0, 1.0})


def test_residual_zero_residuals():
    x = np.array([0.5, 1.5, 2.5])
    rs = resample_residual(x, x.copy(), mean(), m=4, seed=2)
    for j in range(4):
        assert np.array_equal(rs.replicates[j], x)


def test_residual_determinism():
    x = np.arange(10.0)
    y = x + np.sin(x)
    a = resample_residual(x, y, quantile(0.5), m=6, seed=9)
    b = resample_residual(x, y, quantile(0.5), m=6, seed=9)
    assert np.array_equal(a.replicates, b.replicates)


def test_residual_refused_for_threshold():
    with pytest.raises(ValueError, match="shift recalibration undefined"):
        resample_residual(np.array([0.2, 0.8]), np.array([0.0, 1.0]), threshold(0.5), m=3, seed=0)


def test_band_zero_width_when_replicates_identical():
    y = np.array([1.0, 2.0, 3.0, 4.0])
    x = np.array([0.0, 1.0, 2.0, 3.0])
    dists = [Discrete([v], [1.0]) for v in y]
    rs = resample_auto(dists, mean(), m=5, seed=3)
    # x equals the point-mass means, so every replicate curve is identical
    band = consistency_band(rs, mean(), level=0.9)
    assert np.array_equal(band.lower, band.upper)
    assert np.array_equal(band.lower, y)


def test_band_level_one_is_min_max():
    x = np.array([0.0, 1.0, 2.0])
    rs_a = resample_residual(x, x + 1.0, mean(), m=2, seed=11)
    band = consistency_band(rs_a, mean(), level=1.0)
    curves = []
    from isocal.pav import fit_isotonic

    for j in range(2):
        curves.append(fit_isotonic(x, rs_a.replicates[j], mean()).diagram_points()[1])
    curves = np.array(curves)
    assert np.array_equal(band.lower, curves.min(axis=0))
    assert np.array_equal(band.upper, curves.max(axis=0))


def test_band_envelopes_nondecreasing_and_ordered():
    dists, _ = gen_scenario("perfect", 60, seed=12)
    rs = resample_auto(dists, mean(), m=40, seed=13)
    band = consistency_band(rs, mean(), level=0.9)
    assert np.all(np.diff(band.at) > 0)
    assert np.all(np.diff(band.lower) >= 0)
    assert np.all(np.diff(band.upper) >= 0)
    assert np.all(band.lower <= band.upper)


def test_band_covers_diagonal_under_the_null():
    dists, _ = gen_scenario("perfect", 200, seed=14)
    rs = resample_auto(dists, mean(), m=200, seed=15)
    band = consistency_band(rs, mean(), level=0.9)
    inside = (band.lower <= band.at) & (band.at <= band.upper)
    assert inside.mean() >= 0.80


def test_band_needs_two_replicates():
    dists, _ = gen_scenario("perfect", 5, seed=0)
    rs = resample_auto(dists, mean(), m=1, seed=0)
    with pytest.raises(ValueError, match="at least 2"):
        consistency_band(rs, mean(), level=0.9)


def test_mc_pvalue_arithmetic():
    assert mc_pvalue(1.0, np.linspace(0.1, 0.9, 19)) == pytest.approx(0.05)
    assert mc_pvalue(0.0, np.linspace(0.1, 0.9, 19)) == pytest.approx(1.0)
    resampled = np.concatenate([np.full(49, 0.1), np.full(50, 0.9)])
    assert mc_pvalue(0.5, resampled) == pytest.approx(0.51)
    with pytest.raises(ValueError):
        mc_pvalue(0.5, [])


def test_pit_band_geometry():
    band = pit_band(n=400, m=1000, level=0.9, seed=21)
    assert band.at.size == 101
    assert band.at[0] == 0.0 and band.at[-1] == 1.0
    mid = 50  # u = 0.5
    half_width = 0.5 * (band.upper[mid] - band.lower[mid])
    assert 0.02 <= half_width <= 0.06
    assert np.all(band.lower <= band.upper)


def test_pit_band_degenerate_n1():
    band = pit_band(n=1, m=100, level=0.9, seed=22)
    mid = 50
    assert band.lower[mid] == 0.0
    assert band.upper[mid] == 1.0


def test_pit_band_determinism():
    a = pit_band(n=50, m=30, level=0.9, seed=23)
    b = pit_band(n=50, m=30, level=0.9, seed=23)
    assert np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)


def test_marginal_band_shapes_and_determinism():
    dists, y = gen_scenario("unfocused", 80, seed=24)
    a = marginal_band(dists, y, m=50, level=0.9, seed=25)
    b = marginal_band(dists, y, m=50, level=0.9, seed=25)
    assert a.at.size == np.unique(y).size
    assert np.array_equal(a.lower, b.lower) and np.array_equal(a.upper, b.upper)
    assert np.all((a.lower >= 0) & (a.upper <= 1))
    assert np.all(a.lower <= a.upper)


def test_marginal_band_covers_curve_under_the_null():
    from isocal.diagrams import marginal_reliability

    dists, _ = gen_scenario("perfect", 150, seed=26)
    # outcomes drawn from the average forecast CDF satisfy marginal calibration
    rng = np.random.default_rng(27)
    pick = rng.integers(0, len(dists), size=len(dists))
    ybar = np.array([dists[k].sample_from_uniform(u) for k, u in zip(pick, rng.random(len(dists)))])
    band = marginal_band(dists, ybar, m=200, level=0.9, seed=28)
    curve = marginal_reliability(dists, ybar)
    inside = (band.lower <= curve.y) & (curve.y <= band.upper)
    assert inside.mean() >= 0.75
