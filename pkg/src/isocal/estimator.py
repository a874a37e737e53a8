"""Scikit-learn compatible wrapper around the isotonic recalibration fit."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from ._validation import check_xy
from .functionals import Functional, parse_functional
from .pav import fit_isotonic
from .scores import ScoreDecomposition, decompose


class IsotonicRecalibrator(BaseEstimator, TransformerMixin):
    """Nondecreasing recalibration of point forecasts for any identifiable
    functional, in the scikit-learn estimator idiom.

    ``fit(X, y)`` pools the pool-adjacent-violators blocks of forecasts X
    against outcomes y; ``predict`` / ``transform`` map new forecast values
    through the fitted recalibration curve, interpolating linearly between
    the distinct training forecast values and clipping to the curve's end
    values outside the training range.

    Parameters
    ----------
    functional : str or Functional, default "mean"
        Target functional, either as an object or in the compact string
        grammar, e.g. ``"quantile:0.9"`` or ``"expectile:0.5"``.

    Attributes
    ----------
    functional_ : Functional
        The parsed functional used by the fit.
    X_thresholds_, y_thresholds_ : ndarray
        Distinct training forecast values and their recalibrated values.
    fit_result_ : IsotonicFit
        Full block structure of the isotonic fit.

    Examples
    --------
    >>> rec = IsotonicRecalibrator()
    >>> rec.fit([1, 2, 3, 4], [1, 3, 2, 5]).predict([2.5])
    array([2.5])
    """

    def __init__(self, functional="mean"):
        self.functional = functional

    @staticmethod
    def _column(X) -> np.ndarray:
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 2 and arr.shape[1] == 1:
            arr = arr[:, 0]
        if arr.ndim != 1:
            raise ValueError("X must be one-dimensional or a single column")
        return arr

    def fit(self, X, y):
        x = self._column(X)
        x, y = check_xy(x, y)
        f = self.functional
        if isinstance(f, str):
            f = parse_functional(f)
        elif not isinstance(f, Functional):
            raise ValueError("functional must be a Functional or a grammar string")
        self.functional_: Functional = f
        self.fit_result_ = fit_isotonic(x, y, self.functional_)
        self.X_thresholds_, self.y_thresholds_ = self.fit_result_.diagram_points()
        self.n_features_in_ = 1
        return self

    def _check_fitted(self):
        if not hasattr(self, "fit_result_"):
            raise NotFittedError("this IsotonicRecalibrator instance is not fitted yet")

    def predict(self, X) -> np.ndarray:
        self._check_fitted()
        x = self._column(X)
        return np.interp(x, self.X_thresholds_, self.y_thresholds_)

    def transform(self, X) -> np.ndarray:
        return self.predict(X)

    def decomposition(self) -> ScoreDecomposition:
        """Score decomposition of the training forecasts under the fitted
        functional's canonical loss."""
        self._check_fitted()
        fit = self.fit_result_
        return decompose(fit.x_sorted, fit.y_sorted, self.functional_, fit=fit)
