"""Identifiable functionals, their identification functions, and losses.

A functional T (mean, quantile, expectile, moment, threshold non-exceedance
probability, or Huber) is described by an identification function V(x, y)
that is increasing and left-continuous in the prediction x.  T maps a
distribution to the interval where the expected identification changes
sign; interval-valued functionals (quantiles, Huber) carry a ``side``
selector picking the lower or upper endpoint.

The module evaluates T exactly on finite weighted samples, and provides the
matching canonical loss (squared error for the mean, pinball loss for
quantiles, asymmetric squared error for expectiles, a clipped three-branch
loss for the Huber functional) together with the elementary single-threshold
scores from which every consistent scoring function can be mixed.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ._validation import as_float_array

KINDS = ("mean", "quantile", "expectile", "moment", "threshold", "huber")
SIDES = ("lower", "upper")

#: kinds whose value is an interval in general; ``side`` selects an endpoint
INTERVAL_KINDS = ("quantile", "huber")

#: kinds whose identification depends on x - y only (translation equivariant)
PREDICTION_ERROR_KINDS = ("mean", "quantile", "expectile", "huber")


@dataclass(frozen=True)
class Functional:
    """Description of the target statistical functional.

    Parameters
    ----------
    kind : str
        One of ``mean``, ``quantile``, ``expectile``, ``moment``,
        ``threshold``, ``huber``.
    alpha : float
        Probability level in (0, 1); used by quantile, expectile and huber.
    n : int
        Moment order (>= 1); used by moment.
    t : float
        Threshold; used by threshold (non-exceedance probability of y <= t).
    a, b : float
        Positive clipping parameters of the Huber functional.
    side : str
        ``lower`` or ``upper``; selects the endpoint for interval-valued
        kinds (quantile, huber) and is ignored otherwise.
    """

    kind: str
    alpha: float = 0.5
    n: int = 1
    t: float = 0.0
    a: float = 1.0
    b: float = 1.0
    side: str = "lower"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown functional kind {self.kind!r}")
        if self.side not in SIDES:
            raise ValueError(f"side must be 'lower' or 'upper', got {self.side!r}")
        if self.kind in ("quantile", "expectile", "huber"):
            if not 0.0 < self.alpha < 1.0:
                raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.kind == "moment":
            if int(self.n) != self.n or self.n < 1:
                raise ValueError(f"moment order must be a positive integer, got {self.n}")
        if self.kind == "huber" and (self.a <= 0 or self.b <= 0):
            raise ValueError("huber clipping parameters a, b must be positive")

    @property
    def is_interval(self) -> bool:
        return self.kind in INTERVAL_KINDS

    @property
    def is_prediction_error(self) -> bool:
        """True when V(x, y) = v(x - y), so shift recalibration is meaningful."""
        return self.kind in PREDICTION_ERROR_KINDS or (self.kind == "moment" and self.n == 1)

    def with_side(self, side: str) -> "Functional":
        return replace(self, side=side)

    def label(self) -> str:
        """Compact string form, the inverse of :func:`parse_functional`."""
        if self.kind == "mean":
            return "mean"
        if self.kind == "quantile":
            s = f"quantile:{self.alpha:g}"
            return s if self.side == "lower" else s + ":upper"
        if self.kind == "expectile":
            return f"expectile:{self.alpha:g}"
        if self.kind == "moment":
            return f"moment:{self.n:d}"
        if self.kind == "threshold":
            return f"threshold:{self.t:g}"
        s = f"huber:{self.alpha:g}:{self.a:g}:{self.b:g}"
        return s if self.side == "lower" else s + ":upper"


def mean() -> Functional:
    return Functional("mean")


def quantile(alpha: float, side: str = "lower") -> Functional:
    return Functional("quantile", alpha=alpha, side=side)


def expectile(alpha: float) -> Functional:
    return Functional("expectile", alpha=alpha)


def moment(n: int) -> Functional:
    return Functional("moment", n=int(n))


def threshold(t: float) -> Functional:
    return Functional("threshold", t=float(t))


def huber(alpha: float, a: float, b: float, side: str = "lower") -> Functional:
    return Functional("huber", alpha=alpha, a=float(a), b=float(b), side=side)


def parse_functional(text: str) -> Functional:
    """Parse the compact grammar used by the command line.

    Examples: ``mean``, ``quantile:0.75``, ``quantile:0.75:upper``,
    ``expectile:0.5``, ``moment:2``, ``threshold:2.0``, ``huber:0.5:1:1``.
    """
    parts = [p.strip() for p in str(text).strip().split(":")]
    kind = parts[0].lower()
    args = parts[1:]
    try:
        if kind == "mean":
            if args:
                raise ValueError("mean takes no parameters")
            return mean()
        if kind == "quantile":
            if len(args) == 1:
                return quantile(float(args[0]))
            if len(args) == 2:
                return quantile(float(args[0]), args[1].lower())
            raise ValueError("expected quantile:ALPHA or quantile:ALPHA:SIDE")
        if kind == "expectile":
            if len(args) != 1:
                raise ValueError("expected expectile:ALPHA")
            return expectile(float(args[0]))
        if kind == "moment":
            if len(args) != 1:
                raise ValueError("expected moment:N")
            return moment(int(args[0]))
        if kind == "threshold":
            if len(args) != 1:
                raise ValueError("expected threshold:T")
            return threshold(float(args[0]))
        if kind == "huber":
            if len(args) == 3:
                return huber(float(args[0]), float(args[1]), float(args[2]))
            if len(args) == 4:
                return huber(float(args[0]), float(args[1]), float(args[2]), args[3].lower())
            raise ValueError("expected huber:ALPHA:A:B or huber:ALPHA:A:B:SIDE")
    except ValueError as exc:
        raise ValueError(f"cannot parse functional {text!r}: {exc}") from None
    raise ValueError(f"cannot parse functional {text!r}: unknown kind {kind!r}")


# ---------------------------------------------------------------------------
# identification functions and losses
# ---------------------------------------------------------------------------

def clip_ab(t, a: float, b: float):
    """Clipping function max(min(t, b), -a)."""
    return np.minimum(np.maximum(t, -a), b)


def identification(f: Functional, x, y):
    """Identification function V(x, y); vectorizes over numpy inputs."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if f.kind == "mean":
        v = x - y
    elif f.kind == "quantile":
        v = (y < x).astype(float) - f.alpha
    elif f.kind == "expectile":
        v = np.abs((y < x).astype(float) - f.alpha) * (x - y)
    elif f.kind == "moment":
        v = x - y ** f.n
    elif f.kind == "threshold":
        v = x - (y <= f.t).astype(float)
    else:  # huber
        v = np.abs((y < x).astype(float) - f.alpha) * clip_ab(x - y, f.a, f.b)
    return v if v.ndim else float(v)


def canonical_loss(f: Functional, x, y):
    """Canonical loss S(x, y) for the functional; vectorizes over inputs.

    mean / moment: (x - y^n)^2; expectile: 2|1{x>=y} - alpha|(x - y)^2;
    quantile: 2(1{x>=y} - alpha)(x - y); threshold: Brier form
    (x - 1{y<=t})^2 with x a probability; huber: three-branch clipped loss.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if f.kind == "mean":
        s = (x - y) ** 2
    elif f.kind == "moment":
        s = (x - y ** f.n) ** 2
    elif f.kind == "expectile":
        s = 2.0 * np.abs((x >= y).astype(float) - f.alpha) * (x - y) ** 2
    elif f.kind == "quantile":
        s = 2.0 * ((x >= y).astype(float) - f.alpha) * (x - y)
    elif f.kind == "threshold":
        if np.any(x < 0.0) or np.any(x > 1.0):
            raise ValueError("probability out of range")
        s = (x - (y <= f.t).astype(float)) ** 2
    else:  # huber
        d = x - y
        w = 2.0 * np.abs((x >= y).astype(float) - f.alpha)
        body = np.where(
            d < -f.a,
            2.0 * f.a * np.abs(d) - f.a ** 2,
            np.where(d > f.b, 2.0 * f.b * np.abs(d) - f.b ** 2, d ** 2),
        )
        s = w * body
    return s if s.ndim else float(s)


def elementary_score(f: Functional, eta: float, x, y):
    """Elementary score S_eta(x, y) = (1{eta <= x} - 1{eta <= y}) V(eta, y).

    These single-threshold losses are consistent for T, and their mixtures
    over eta exhaust the consistent scoring functions for the standard
    functionals; the canonical loss is the Lebesgue mixture.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ind = (eta <= x).astype(float) - (eta <= y).astype(float)
    s = ind * identification(f, eta, y)
    return s if s.ndim else float(s)


# ---------------------------------------------------------------------------
# exact evaluation on finite weighted samples
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SortedSample:
    """Weighted multiset of outcomes with nondecreasing values.

    Represents the empirical measure on which functionals are evaluated;
    weights default to 1.  Use :meth:`from_values` for unsorted input.
    """

    values: np.ndarray
    weights: np.ndarray

    @classmethod
    def from_values(cls, values, weights=None) -> "SortedSample":
        v = as_float_array(values, "values")
        if weights is None:
            w = np.ones_like(v)
        else:
            w = as_float_array(weights, "weights")
            if w.shape != v.shape:
                raise ValueError("weights must match values in length")
            if np.any(w <= 0):
                raise ValueError("weights must be positive")
        order = np.argsort(v, kind="stable")
        return cls(values=v[order], weights=w[order])

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    def merge(self, other: "SortedSample") -> "SortedSample":
        v = np.concatenate([self.values, other.values])
        w = np.concatenate([self.weights, other.weights])
        order = np.argsort(v, kind="stable")
        return SortedSample(values=v[order], weights=w[order])


def _weighted_quantile(values: np.ndarray, weights: np.ndarray, alpha: float, side: str) -> float:
    cum = np.cumsum(weights)
    target = alpha * cum[-1]
    sorter = "left" if side == "lower" else "right"
    idx = int(np.searchsorted(cum, target, side=sorter))
    return float(values[min(idx, values.size - 1)])


def _weighted_expectile(values: np.ndarray, weights: np.ndarray, alpha: float) -> float:
    # Exact root of the piecewise linear identification sum
    #   g(x) = (1-alpha) sum_{y<x} w (x-y) + alpha sum_{y>=x} w (x-y),
    # located by the sign change of g over the distinct values and solved
    # linearly on the bracketing segment.
    distinct, start = np.unique(values, return_index=True)
    if distinct.size == 1:
        return float(distinct[0])
    w_cum = np.concatenate([[0.0], np.cumsum(weights)])
    wy_cum = np.concatenate([[0.0], np.cumsum(weights * values)])
    total_w = w_cum[-1]
    total_wy = wy_cum[-1]
    # weight strictly below distinct[j] is w_cum[start[j]]
    bw = w_cum[start]
    bwy = wy_cum[start]
    g = (1.0 - alpha) * (bw * distinct - bwy) + alpha * ((total_w - bw) * distinct - (total_wy - bwy))
    j = int(np.argmax(g >= 0.0))  # g[0] <= 0 < g[-1]; first nonnegative
    if j == 0:
        return float(distinct[0])
    # on (distinct[j-1], distinct[j]] the strictly-below weight is bw[j]
    num = (1.0 - alpha) * bwy[j] + alpha * (total_wy - bwy[j])
    den = (1.0 - alpha) * bw[j] + alpha * (total_w - bw[j])
    x = num / den
    return float(min(max(x, distinct[j - 1]), distinct[j]))


def _huber_identification_sum(x: float, values, weights, alpha, a, b) -> float:
    w = np.abs((values < x).astype(float) - alpha) * weights
    return float(np.sum(w * clip_ab(x - values, a, b)))


def _weighted_huber(values: np.ndarray, weights: np.ndarray, f: Functional) -> float:
    # g is continuous, nondecreasing and piecewise linear with kinks only at
    # y_i, y_i - a and y_i + b; locate the boundary root on the bracketing
    # segment and solve linearly.  Flat zero stretches make T interval
    # valued; f.side picks the endpoint.
    alpha, a, b = f.alpha, f.a, f.b
    pts = np.unique(np.concatenate([values, values - a, values + b]))
    g = np.array([_huber_identification_sum(x, values, weights, alpha, a, b) for x in pts])
    # g(pts[0]) = -a * alpha * W < 0 and g(pts[-1]) = b * (1-alpha) * W > 0

    def interp(k_lo: int, k_hi: int) -> float:
        g_lo, g_hi = g[k_lo], g[k_hi]
        if g_hi == g_lo:
            return float(pts[k_lo])
        return float(pts[k_lo] + (0.0 - g_lo) * (pts[k_hi] - pts[k_lo]) / (g_hi - g_lo))

    if f.side == "lower":
        k = int(np.argmax(g >= 0.0))  # first index with g >= 0; g[0] < 0 always
        if k == 0:
            return float(pts[0])
        return interp(k - 1, k)
    k = int(g.size - 1 - np.argmax((g <= 0.0)[::-1]))  # last index with g <= 0
    if k >= g.size - 1:
        return float(pts[-1])
    return interp(k, k + 1)


def eval_functional(f: Functional, sample: SortedSample) -> float:
    """Evaluate T on a finite weighted sample, exactly.

    Mean, moment and threshold kinds reduce to weighted means of transformed
    outcomes; quantiles are weighted order statistics with the side selected
    by ``f.side``; expectile and Huber values are roots of piecewise linear
    identification sums, located by exact sorted scans rather than iterative
    solvers.
    """
    v, w = sample.values, sample.weights
    if v.size == 0:
        raise ValueError("empty empirical measure")
    if f.kind == "mean":
        return float(np.average(v, weights=w))
    if f.kind == "moment":
        return float(np.average(v ** f.n, weights=w))
    if f.kind == "threshold":
        return float(np.average((v <= f.t).astype(float), weights=w))
    if f.kind == "quantile":
        return _weighted_quantile(v, w, f.alpha, f.side)
    if f.kind == "expectile":
        return _weighted_expectile(v, w, f.alpha)
    return _weighted_huber(v, w, f)
