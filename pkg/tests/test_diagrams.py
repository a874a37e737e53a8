import numpy as np
import pytest

from isocal.diagrams import (
    CurveBand,
    ks_uniform,
    marginal_reliability,
    pit_reliability,
    reliability_diagram,
)
from isocal.distributions import Discrete, UniformMixture
from isocal.functionals import mean, quantile
from isocal.pav import fit_isotonic
from isocal.synthetic import fit_ols, gen_scenario, kvalseth_data


def test_single_pair_diagram():
    d = reliability_diagram([2.0], [5.0], mean())
    assert np.array_equal(d.points_x, [2.0])
    assert np.array_equal(d.points_y, [5.0])


def test_toy_data_diagram_points():
    x, y = kvalseth_data()
    slope, intercept = fit_ols(x, y)
    d = reliability_diagram(intercept + slope * x, y, mean())
    assert d.points_y == pytest.approx([4, 5, 6, 9, 10, 32 / 3, 32 / 3, 32 / 3, 15])
    assert np.all(np.diff(d.points_x) > 0)
    assert np.all(np.diff(d.points_y) >= 0)


def test_calibrated_input_sits_on_diagonal():
    rng = np.random.default_rng(3)
    x = rng.normal(size=40)
    y = x + rng.normal(size=40)
    recal = fit_isotonic(x, y, mean())
    d = reliability_diagram(recal.fitted, recal.y_sorted, mean())
    assert d.points_y == pytest.approx(d.points_x, abs=1e-12)


def test_diagram_points_equal_block_values():
    rng = np.random.default_rng(5)
    x = np.round(rng.normal(size=60), 1)
    y = rng.normal(size=60)
    f = quantile(0.3)
    fit = fit_isotonic(x, y, f)
    d = reliability_diagram(x, y, f, fit=fit)
    block_values = {b.value for b in fit.blocks}
    assert set(np.asarray(d.points_y)).issubset(block_values)
    assert d.decomposition.mcb >= -1e-12


def test_pit_reliability_examples():
    c = pit_reliability([0.25, 0.75])
    assert np.array_equal(c.x, [0.0, 0.25, 0.75, 1.0])
    assert np.array_equal(c.y, [0.0, 0.5, 1.0, 1.0])
    deg = pit_reliability([0.5, 0.5, 0.5])
    assert np.array_equal(deg.x, [0.0, 0.5, 1.0])
    assert np.array_equal(deg.y, [0.0, 1.0, 1.0])


def test_pit_reliability_is_valid_cdf_curve():
    rng = np.random.default_rng(7)
    c = pit_reliability(rng.random(500))
    assert np.all(np.diff(c.x) > 0)
    assert np.all(np.diff(c.y) >= 0)
    assert c.y[-1] == 1.0
    assert np.all((c.y >= 0) & (c.y <= 1))


def test_pit_reliability_rejects_out_of_range():
    with pytest.raises(ValueError, match="\\[0, 1\\]"):
        pit_reliability([0.5, 1.2])


def test_pit_ks_close_to_diagonal_for_perfect_forecasts():
    from isocal.distributions import pit_values

    dists, y = gen_scenario("perfect", 400, seed=20)
    pits = pit_values(dists, y, np.random.default_rng(21))
    curve = pit_reliability(pits)
    assert ks_uniform(pits) < 0.10
    assert np.max(np.abs(curve.y - curve.x)) < 0.10 + 1 / 400


def test_ks_uniform_hand_value():
    # ECDF of {0.1, 0.9}: largest gap to the diagonal is at 0.9- (0.5 vs 0.9)
    assert ks_uniform([0.1, 0.9]) == pytest.approx(0.4)


def test_marginal_point_mass():
    c = marginal_reliability([Discrete([2.0], [1.0])], [2.0])
    assert np.array_equal(c.x, [1.0])
    assert np.array_equal(c.y, [1.0])


def test_marginal_two_uniforms():
    u = UniformMixture([1.0], [0.0, 1.0])
    c = marginal_reliability([u, u], [0.25, 0.75])
    assert c.x == pytest.approx([0.25, 0.75])
    assert c.y == pytest.approx([0.5, 1.0])


def test_marginal_lopsided_is_marginally_calibrated():
    dists, y = gen_scenario("lopsided", 2000, seed=9)
    c = marginal_reliability(dists, y)
    assert np.all(np.diff(c.x) >= -1e-12)
    assert np.all((c.x >= 0) & (c.x <= 1))
    assert np.all((c.y >= 0) & (c.y <= 1))
    assert np.max(np.abs(c.y - c.x)) < 0.05


def test_curve_band_validation():
    with pytest.raises(ValueError, match="lower envelope exceeds"):
        CurveBand(at=np.array([0.0]), lower=np.array([1.0]), upper=np.array([0.0]), level=0.9)
    with pytest.raises(ValueError, match="one length"):
        CurveBand(at=np.array([0.0]), lower=np.array([0.0, 1.0]), upper=np.array([1.0]), level=0.9)
