"""Score decompositions built on isotonic recalibration.

The mean canonical score of forecasts x against outcomes y splits into

    score = MCB - DSC + UNC

where MCB (miscalibration) is the improvement from isotonic recalibration,
DSC (discrimination) is the recalibrated forecast's advantage over the best
constant forecast, and UNC (uncertainty) is the constant forecast's score.
Both MCB and DSC are nonnegative by the optimality of the isotonic fit.

For functionals whose identification depends on the error x - y only, MCB
further splits into an unconditional part, removable by adding a constant
shift c to all forecasts, and a conditional remainder:

    MCB = MCB_uncond + MCB_cond,   MCB_uncond = score - score(x + c).

The skill score / coefficient of determination R* = (DSC - MCB) / UNC
equals the classical R^2 under in-sample least squares and its analogue
R^1 under in-sample median regression.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from ._validation import check_xy
from .functionals import Functional, SortedSample, canonical_loss, eval_functional
from .pav import IsotonicFit, fit_isotonic


@dataclass(frozen=True)
class ScoreDecomposition:
    """Mean score with miscalibration, discrimination and uncertainty parts.

    ``mcb_uncond``, ``mcb_cond`` and ``shift_c`` are populated by
    :func:`extended_decompose` only; ``r_star`` is present whenever the
    marginal score is strictly positive.
    """

    score: float
    score_recalibrated: float
    score_marginal: float
    mcb: float
    dsc: float
    unc: float
    mcb_uncond: float | None = None
    mcb_cond: float | None = None
    shift_c: float | None = None
    r_star: float | None = None

    def to_dict(self) -> dict:
        out = {
            "score": self.score,
            "score_recalibrated": self.score_recalibrated,
            "score_marginal": self.score_marginal,
            "mcb": self.mcb,
            "dsc": self.dsc,
            "unc": self.unc,
        }
        for key in ("mcb_uncond", "mcb_cond", "shift_c", "r_star"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        return out

    def to_json(self, indent=None) -> str:
        return json.dumps(self.to_dict(), indent=indent)


def marginal_value(y, f: Functional) -> float:
    """Functional of the empirical outcome distribution (the constant fit)."""
    return eval_functional(f, SortedSample.from_values(y))


def decompose(x, y, f: Functional, fit: IsotonicFit | None = None) -> ScoreDecomposition:
    """Decompose the mean canonical score of the pairs (x, y) under f.

    A precomputed :class:`IsotonicFit` for the same data may be passed to
    avoid refitting.
    """
    x, y = check_xy(x, y)
    if fit is None:
        fit = fit_isotonic(x, y, f)
    xs, ys = fit.x_sorted, fit.y_sorted
    x0 = marginal_value(ys, f)
    score = float(np.mean(canonical_loss(f, xs, ys)))
    score_rc = float(np.mean(canonical_loss(f, fit.fitted, ys)))
    score_mg = float(np.mean(canonical_loss(f, x0, ys)))
    unc = score_mg
    mcb = score - score_rc
    dsc = score_mg - score_rc
    r_star = (dsc - mcb) / unc if unc > 0 else None
    return ScoreDecomposition(
        score=score,
        score_recalibrated=score_rc,
        score_marginal=score_mg,
        mcb=mcb,
        dsc=dsc,
        unc=unc,
        r_star=r_star,
    )


def unconditional_shift(x, y, f: Functional) -> float:
    """Constant c such that the shifted forecasts x + c are unconditionally
    calibrated for f in the empirical sense.

    The identification must be of prediction-error form (mean, quantile,
    expectile, Huber, first moment); c is then the functional of the
    residual sample y - x, with the side-selected value for interval kinds.
    """
    if not f.is_prediction_error:
        raise ValueError("shift recalibration undefined for this functional")
    x, y = check_xy(x, y)
    return eval_functional(f, SortedSample.from_values(y - x))


def extended_decompose(x, y, f: Functional, fit: IsotonicFit | None = None) -> ScoreDecomposition:
    """Decomposition with the miscalibration split into unconditional and
    conditional components via the empirical shift c."""
    x, y = check_xy(x, y)
    base = decompose(x, y, f, fit=fit)
    c = unconditional_shift(x, y, f)
    score_urc = float(np.mean(canonical_loss(f, x + c, y)))
    return replace(
        base,
        mcb_uncond=base.score - score_urc,
        mcb_cond=score_urc - base.score_recalibrated,
        shift_c=c,
    )


def skill_and_rstar(d: ScoreDecomposition) -> float:
    """Skill score (DSC - MCB) / UNC; equals R* for in-sample fits."""
    if not np.isfinite(d.unc) or d.unc <= 0:
        raise ValueError("degenerate uncertainty")
    return (d.dsc - d.mcb) / d.unc
