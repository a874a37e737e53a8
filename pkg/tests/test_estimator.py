import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from isocal.estimator import IsotonicRecalibrator
from isocal.functionals import quantile
from isocal.synthetic import fit_ols, kvalseth_data


def test_fit_predict_interpolates_and_clips():
    x, y = kvalseth_data()
    slope, intercept = fit_ols(x, y)
    rec = IsotonicRecalibrator().fit(intercept + slope * x, y)
    # at a training forecast value, return its recalibrated value
    assert rec.predict([intercept + slope * 1.0])[0] == pytest.approx(4.0)
    # between points, interpolate linearly
    px, py = rec.X_thresholds_, rec.y_thresholds_
    mid = 0.5 * (px[0] + px[1])
    assert rec.predict([mid])[0] == pytest.approx(0.5 * (py[0] + py[1]))
    # outside the training range, clip to the end values
    assert rec.predict([px[0] - 100.0])[0] == py[0]
    assert rec.predict([px[-1] + 100.0])[0] == py[-1]


def test_transform_is_predict_and_fit_transform_works():
    rng = np.random.default_rng(1)
    x = rng.normal(size=50)
    y = x + rng.normal(size=50)
    rec = IsotonicRecalibrator(functional="expectile:0.5")
    out = rec.fit_transform(x, y)
    assert np.array_equal(out, rec.predict(x))
    assert np.all(np.diff(rec.y_thresholds_) >= 0)


def test_functional_object_and_string_agree():
    rng = np.random.default_rng(2)
    x = rng.normal(size=30)
    y = rng.normal(size=30)
    a = IsotonicRecalibrator(functional="quantile:0.25").fit(x, y)
    b = IsotonicRecalibrator(functional=quantile(0.25)).fit(x, y)
    assert np.array_equal(a.y_thresholds_, b.y_thresholds_)


def test_sklearn_protocol():
    rec = IsotonicRecalibrator(functional="quantile:0.9")
    assert rec.get_params() == {"functional": "quantile:0.9"}
    twin = clone(rec)
    assert twin.get_params() == rec.get_params()
    rec.set_params(functional="mean")
    assert rec.functional == "mean"
    with pytest.raises(NotFittedError):
        rec.predict([0.0])


def test_accepts_column_vector():
    x = np.arange(5.0).reshape(-1, 1)
    y = np.array([0.0, 2.0, 1.0, 3.0, 4.0])
    rec = IsotonicRecalibrator().fit(x, y)
    assert rec.predict(x).shape == (5,)
    with pytest.raises(ValueError, match="one-dimensional"):
        rec.fit(np.zeros((3, 2)), np.zeros(3))


def test_decomposition_shortcut():
    x, y = kvalseth_data()
    slope, intercept = fit_ols(x, y)
    rec = IsotonicRecalibrator().fit(intercept + slope * x, y)
    d = rec.decomposition()
    assert d.unc == pytest.approx(12.0)
    assert d.r_star == pytest.approx(0.779, abs=1e-3)
