"""Generic pool-adjacent-violators algorithm for any identifiable functional.

Given pairs (x_i, y_i), the data are stably sorted by the forecast x, ties
in x are pooled into single groups so the recalibration map is a function
of x, and adjacent groups whose functional values violate monotonicity are
merged until the block values are nondecreasing.  Each block value is the
functional evaluated on the block's empirical outcome distribution, so the
fitted sequence minimizes the mean of every consistent scoring function for
the functional over all nondecreasing candidate sequences.

Mean, moment and threshold functionals use O(1) running-sum merges (the
classical linear-time algorithm on transformed outcomes); quantile,
expectile and Huber blocks keep sorted outcome arrays and re-evaluate on
merge, which is O(size of merged block) per merge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._validation import check_xy
from .functionals import Functional, SortedSample, eval_functional

_MEAN_LIKE = ("mean", "moment", "threshold")


@dataclass(frozen=True)
class Block:
    """A maximal run of consecutive sorted indices sharing one fitted value."""

    start: int  # inclusive position in sorted-x order
    end: int  # exclusive
    value: float


@dataclass(frozen=True)
class IsotonicFit:
    """Result of the isotonic fit, aligned to sorted-x order.

    Attributes
    ----------
    x_sorted, y_sorted : ndarray
        The input pairs after the stable sort by x.
    order : ndarray
        Permutation such that ``x_sorted = x[order]``.
    fitted : ndarray
        Nondecreasing recalibrated values, one per sorted pair.
    blocks : tuple of Block
        Consecutive index ranges with constant fitted value.
    tie_starts : ndarray
        Start positions of the pre-pooled groups of equal forecast values.
    """

    functional: Functional
    x_sorted: np.ndarray
    y_sorted: np.ndarray
    order: np.ndarray
    fitted: np.ndarray
    blocks: tuple
    tie_starts: np.ndarray

    def fitted_original_order(self) -> np.ndarray:
        """Fitted values mapped back to the input ordering."""
        out = np.empty_like(self.fitted)
        out[self.order] = self.fitted
        return out

    def block_outcomes(self, k: int) -> np.ndarray:
        """The multiset of outcomes pooled into block k."""
        b = self.blocks[k]
        return self.y_sorted[b.start:b.end]

    def diagram_points(self) -> tuple[np.ndarray, np.ndarray]:
        """(distinct forecast values, recalibrated value at each)."""
        return self.x_sorted[self.tie_starts], self.fitted[self.tie_starts]


def _tie_starts(x_sorted: np.ndarray) -> np.ndarray:
    if x_sorted.size == 1:
        return np.array([0])
    changed = np.empty(x_sorted.size, dtype=bool)
    changed[0] = True
    np.not_equal(x_sorted[1:], x_sorted[:-1], out=changed[1:])
    return np.flatnonzero(changed)


def _fit_mean_like(f: Functional, t: np.ndarray, starts: np.ndarray) -> list:
    # stack rows: [start, end, weight, sum, value]
    ends = np.append(starts[1:], t.size)
    sums = np.add.reduceat(t, starts)
    stack: list[list] = []
    for g in range(starts.size):
        w = float(ends[g] - starts[g])
        s = float(sums[g])
        stack.append([int(starts[g]), int(ends[g]), w, s, s / w])
        while len(stack) > 1 and stack[-2][4] > stack[-1][4]:
            hi = stack.pop()
            lo = stack[-1]
            lo[1] = hi[1]
            lo[2] += hi[2]
            lo[3] += hi[3]
            lo[4] = lo[3] / lo[2]
    return [(s[0], s[1], s[4]) for s in stack]


def _fit_sample_based(f: Functional, y: np.ndarray, starts: np.ndarray) -> list:
    ends = np.append(starts[1:], y.size)

    def value_of(sorted_vals: np.ndarray) -> float:
        s = SortedSample(values=sorted_vals, weights=np.ones_like(sorted_vals))
        return eval_functional(f, s)

    # stack rows: [start, end, sorted outcome array, value]
    stack: list[list] = []
    for g in range(starts.size):
        vals = np.sort(y[starts[g]:ends[g]], kind="stable")
        stack.append([int(starts[g]), int(ends[g]), vals, value_of(vals)])
        while len(stack) > 1 and stack[-2][3] > stack[-1][3]:
            hi = stack.pop()
            lo = stack[-1]
            lo[1] = hi[1]
            merged = np.concatenate([lo[2], hi[2]])
            merged.sort(kind="stable")
            lo[2] = merged
            lo[3] = value_of(merged)
    return [(s[0], s[1], s[3]) for s in stack]


def fit_isotonic(x, y, f: Functional) -> IsotonicFit:
    """Fit the nondecreasing recalibration of forecasts x against outcomes y.

    Violation comparisons are strict with no floating-point slack, so
    genuinely flat stretches survive.  Shuffling the input pairs leaves the
    fitted values in sorted-x order unchanged.
    """
    x, y = check_xy(x, y)
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    starts = _tie_starts(xs)

    if f.kind in _MEAN_LIKE:
        if f.kind == "moment":
            t = ys ** f.n
        elif f.kind == "threshold":
            t = (ys <= f.t).astype(float)
        else:
            t = ys
        raw = _fit_mean_like(f, t, starts)
    else:
        raw = _fit_sample_based(f, ys, starts)

    fitted = np.empty_like(ys)
    blocks = []
    for start, end, value in raw:
        fitted[start:end] = value
        blocks.append(Block(start=start, end=end, value=value))
    return IsotonicFit(
        functional=f,
        x_sorted=xs,
        y_sorted=ys,
        order=order,
        fitted=fitted,
        blocks=tuple(blocks),
        tie_starts=starts,
    )
