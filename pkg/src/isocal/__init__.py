"""Calibration diagnostics for point forecasts and predictive distributions.

Isotonic (pool-adjacent-violators) recalibration for identifiable
functionals, reliability diagrams, score decompositions into
miscalibration / discrimination / uncertainty, the skill score and
coefficient of determination R*, PIT and marginal calibration checks, and
Monte Carlo consistency bands and calibration tests.
"""

from .diagrams import (
    Curve,
    CurveBand,
    ReliabilityDiagram,
    ks_uniform,
    marginal_reliability,
    pit_reliability,
    reliability_diagram,
)
from .distributions import (
    Discrete,
    Distribution,
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
from .estimator import IsotonicRecalibrator
from .functionals import (
    Functional,
    SortedSample,
    canonical_loss,
    elementary_score,
    eval_functional,
    expectile,
    huber,
    identification,
    mean,
    moment,
    parse_functional,
    quantile,
    threshold,
)
from .pav import IsotonicFit, fit_isotonic
from .resampling import (
    ResampleSet,
    consistency_band,
    marginal_band,
    mc_pvalue,
    pit_band,
    resample_auto,
    resample_residual,
)
from .scores import (
    ScoreDecomposition,
    decompose,
    extended_decompose,
    skill_and_rstar,
    unconditional_shift,
)
from .synthetic import Scenario, fit_lad, fit_ols, gen_scenario, kvalseth_data

__version__ = "0.1.0"

__all__ = [
    "Curve",
    "CurveBand",
    "Discrete",
    "Distribution",
    "Functional",
    "IsotonicFit",
    "IsotonicRecalibrator",
    "Lopsided",
    "Normal",
    "NormalMixture",
    "PiecewiseLinearCdf",
    "ReliabilityDiagram",
    "ResampleSet",
    "Scenario",
    "ScoreDecomposition",
    "SortedSample",
    "TwoPieceNormal",
    "UniformMixture",
    "canonical_loss",
    "consistency_band",
    "decompose",
    "dist_from_json",
    "elementary_score",
    "eval_functional",
    "expectile",
    "extended_decompose",
    "fit_isotonic",
    "fit_lad",
    "fit_ols",
    "functional_of",
    "gen_scenario",
    "huber",
    "identification",
    "ks_uniform",
    "kvalseth_data",
    "marginal_band",
    "marginal_reliability",
    "mc_pvalue",
    "mean",
    "moment",
    "parse_functional",
    "pit",
    "pit_band",
    "pit_reliability",
    "pit_values",
    "quantile",
    "reliability_diagram",
    "resample_auto",
    "resample_residual",
    "skill_and_rstar",
    "threshold",
    "unconditional_shift",
]
