import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from isocal.diagrams import ks_uniform
from isocal.distributions import (
    Discrete,
    Lopsided,
    Normal,
    NormalMixture,
    PiecewiseLinearCdf,
    TwoPieceNormal,
    UniformMixture,
    dist_from_json,
    functional_of,
    pit,
    pit_values,
)
from isocal.functionals import expectile, huber, mean, moment, quantile, threshold
from isocal.synthetic import gen_scenario

EXAMPLES = [
    Normal(0.3, 1.7),
    NormalMixture([-1.0, 0.5, 2.0], [1.0, 0.4, 1.5], [0.3, 0.5, 0.2]),
    TwoPieceNormal(0.5, 1.0, 2.5),
    Lopsided(-0.7, 0.6),
    Lopsided(0.2, -0.4),
    UniformMixture([0.5, 0.25, 0.25], [0.0, 1.0, 2.0, 3.0]),
    PiecewiseLinearCdf([[0.0, 0.0], [1.0, 0.5], [3.0, 1.0]]),
    Discrete([-1.0, 0.0, 2.0], [0.2, 0.5, 0.3]),
]


def _density(d):
    """Numeric density for validating moments and identification roots."""
    eps = 1e-6
    return lambda t: (float(d.cdf(t + eps)) - float(d.cdf(t - eps))) / (2 * eps)


def test_cdf_examples():
    assert Normal(0, 1).cdf(0.0) == 0.5
    um = UniformMixture([0.5, 0.25, 0.25], [0, 1, 2, 3])
    assert um.cdf(1.5) == pytest.approx(5 / 8)
    point = Discrete([0.0], [1.0])
    assert point.cdf(0.0) == 1.0
    assert point.cdf_left(0.0) == 0.0


def test_quantile_examples():
    assert Normal(0, 1).quantile(0.5) == 0.0
    um = UniformMixture([0.5, 0.25, 0.25], [0, 1, 2, 3])
    assert um.quantile(0.5, "lower") == pytest.approx(1.0)
    d = Discrete([0.0, 1.0], [0.5, 0.5])
    assert d.quantile(0.5, "lower") == 0.0
    assert d.quantile(0.5, "upper") == 1.0


@pytest.mark.parametrize("d", EXAMPLES)
def test_quantile_cdf_consistency(d):
    for alpha in np.linspace(0.02, 0.98, 25):
        lo = d.quantile(alpha, "lower")
        hi = d.quantile(alpha, "upper")
        assert lo <= hi + 1e-12
        assert float(d.cdf(lo)) >= alpha - 1e-9
        assert float(d.cdf_left(hi)) <= alpha + 1e-9


@pytest.mark.parametrize("d", EXAMPLES)
def test_cdf_monotone_and_bounded(d):
    grid = np.linspace(-8, 8, 400)
    vals = np.asarray(d.cdf(grid), dtype=float)
    assert np.all(np.diff(vals) >= -1e-12)
    assert np.all((vals >= 0) & (vals <= 1))
    lefts = np.asarray(d.cdf_left(grid), dtype=float)
    assert np.all(lefts <= vals + 1e-12)


def test_two_piece_equal_spreads_is_normal():
    tp = TwoPieceNormal(1.3, 0.8, 0.8)
    n = Normal(1.3, 0.8)
    for y in np.linspace(-3, 5, 50):
        assert float(tp.cdf(y)) == pytest.approx(float(n.cdf(y)), abs=1e-12)
    for a in np.linspace(0.05, 0.95, 19):
        assert tp.quantile(a) == pytest.approx(n.quantile(a), abs=1e-12)


def _support(d):
    return d.quantile(1e-12, "lower") - 1.0, d.quantile(1.0 - 1e-12, "upper") + 1.0


@pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
@pytest.mark.parametrize("d", EXAMPLES)
def test_moments_match_quadrature(d):
    lo, hi = _support(d)
    for n in (1, 2, 3):
        if isinstance(d, Discrete):
            want = float(np.dot(d.probs, d.atoms ** n))
        else:
            want = quad(lambda t: t ** n * _density(d)(t), lo, hi, limit=800)[0]
        assert d.moment(n) == pytest.approx(want, rel=1e-4, abs=1e-4)


@pytest.mark.parametrize("d", EXAMPLES)
def test_partial_expectation_matches_quadrature(d):
    lo, _ = _support(d)
    for v in (-1.3, 0.4, 2.2):
        if isinstance(d, Discrete):
            keep = d.atoms <= v
            want = float(np.dot(d.probs[keep], d.atoms[keep]))
        else:
            want = quad(lambda t: t * _density(d)(t), lo, v, limit=800)[0]
        assert d.partial_expectation(v) == pytest.approx(want, rel=1e-4, abs=1e-4)


def test_closed_form_means():
    m = NormalMixture([0.7, 0.7 + 1.5], [1, 1], [0.5, 0.5])
    assert functional_of(m, mean()) == pytest.approx(0.7 + 1.5 / 2)
    lop = Lopsided(-0.2, 0.7)
    assert functional_of(lop, mean()) == pytest.approx(-0.2 + math.sqrt(2 / math.pi) * 0.7)
    tp = TwoPieceNormal(2.0, 1.3, 1.3)
    assert functional_of(tp, mean()) == pytest.approx(2.0)


@pytest.mark.parametrize("d", EXAMPLES)
def test_functional_root_solves_expected_identification(d):
    for f in (expectile(0.7), huber(0.3, 0.8, 1.2), huber(0.3, 0.8, 1.2, "upper")):
        t = functional_of(d, f)
        from isocal.distributions import _expected_identification

        assert _expected_identification(d, f, t - 1e-6) <= 1e-7
        assert _expected_identification(d, f, t + 1e-6) >= -1e-7


def test_expectile_half_is_mean_for_distributions():
    for d in EXAMPLES:
        assert functional_of(d, expectile(0.5)) == pytest.approx(d.mean(), abs=1e-8)


def test_threshold_functional_is_cdf():
    d = EXAMPLES[1]
    assert functional_of(d, threshold(0.7)) == pytest.approx(float(d.cdf(0.7)))
    assert functional_of(d, moment(2)) == pytest.approx(d.moment(2))


@pytest.mark.parametrize("d", EXAMPLES)
def test_sampling_moment_match(d):
    rng = np.random.default_rng(99)
    draws = np.asarray(d.sample_from_uniform(rng.random(100_000)), dtype=float)
    m1, m2 = d.moment(1), d.moment(2)
    se1 = math.sqrt(max(m2 - m1 ** 2, 1e-12) / draws.size)
    assert abs(draws.mean() - m1) < 4 * se1
    m4 = d.moment(4)
    se2 = math.sqrt(max(m4 - m2 ** 2, 1e-12) / draws.size)
    assert abs(np.mean(draws ** 2) - m2) < 4 * se2


def test_pit_examples():
    rng = np.random.default_rng(1)
    assert pit(Normal(0, 1), 0.0, rng) == 0.5

    class FixedU:
        def random(self):
            return 0.25

    assert pit(Discrete([0.0], [1.0]), 0.0, FixedU()) == 0.25
    assert pit(UniformMixture([1.0], [0.0, 1.0]), 0.3, rng) == pytest.approx(0.3)


def test_pit_bounds_and_determinism_for_continuous():
    rng = np.random.default_rng(2)
    d = NormalMixture([0.0, 1.0], [1.0, 2.0], [0.6, 0.4])
    vals = [pit(d, 0.37, rng) for _ in range(5)]
    assert all(v == vals[0] for v in vals)
    dd = Discrete([0.0, 1.0], [0.5, 0.5])
    ps = [pit(dd, 0.0, rng) for _ in range(200)]
    assert all(0 <= p <= 0.5 for p in ps)


def test_pit_uniform_for_auto_calibrated_forecasts():
    # KS distance below the 5% critical value in at least 90 of 100 runs
    n = 400
    crit = 1.3581 / math.sqrt(n)
    hits = 0
    for seed in range(100):
        dists, y = gen_scenario("perfect", n, seed=seed)
        rng = np.random.default_rng(10_000 + seed)
        pits = pit_values(dists, y, rng)
        assert np.all((pits >= 0) & (pits <= 1))
        if ks_uniform(pits) < crit:
            hits += 1
    assert hits >= 90


def test_json_roundtrip():
    for d in EXAMPLES:
        again = dist_from_json(json.loads(json.dumps(d.to_json())))
        assert again.to_json() == d.to_json()
        for y in (-0.9, 0.1, 1.7):
            assert float(again.cdf(y)) == pytest.approx(float(d.cdf(y)), abs=1e-15)


def test_json_validation_errors():
    with pytest.raises(ValueError, match="type"):
        dist_from_json({"mu": 0})
    with pytest.raises(ValueError, match="unknown distribution type"):
        dist_from_json({"type": "cauchy"})
    with pytest.raises(ValueError):
        dist_from_json({"type": "normal", "mu": 0.0, "sigma": -1.0})
    with pytest.raises(ValueError, match="sum to 1"):
        dist_from_json({"type": "discrete", "atoms": [0, 1], "probs": [0.5, 0.4]})
    with pytest.raises(ValueError, match="strictly increasing"):
        UniformMixture([0.5, 0.5], [0.0, 0.0, 1.0])
    with pytest.raises(ValueError, match="rise from 0 to 1"):
        PiecewiseLinearCdf([[0.0, 0.1], [1.0, 1.0]])
    with pytest.raises(ValueError, match="delta"):
        Lopsided(0.0, 1.0)
