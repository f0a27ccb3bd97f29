"""Small-ball (small deviation) probabilities of one-dimensional Lévy processes.

``-log P(sup_{0<=t<=1} |X_t| <= eps)`` is bracketed through an exponential
(Esscher) tilt of the process with its large jumps removed, compared with
closed-form rates for named families and checked by Monte Carlo.
"""

from .bounds import (
    BoundReport,
    NegligibilityReport,
    doubling_check,
    gaussian_rate,
    martingale_bounds,
    negligibility_check,
    symmetric_rate,
    theorem15,
    tightness_check,
)
from .calculus import (
    DivergentIntegralError,
    Variant,
    abs_moment,
    effective_drift,
    lemma52_bounds_check,
    signed_moment,
    tail_mass,
    tilted_integral,
    tilted_integral_quad,
    truncated_drift,
)
from .catalog import (
    CompoundPoissonNoDrift,
    GammaDrift,
    NoRate,
    PolynomialMeasure,
    StableSubordinatorDrift,
    StrictlyStable,
    SubordinatedBM,
    VarianceGamma,
    asymptotic_rate,
    gamma_exact,
    poisson_tail_bound,
    subordinated_rate_terms,
    tauberian_subordinator_rate,
)
from .classify import Classification, classify
from .esscher import (
    EsscherSolution,
    NoRoot,
    NumericalFailure,
    lambda_eps,
    lambda_eps_deriv,
    solve_esscher,
)
from .model import (
    NEGATIVE,
    POSITIVE,
    Atom,
    LevyTriplet,
    NumericDensity,
    RateExpression,
    TemperedPowerLaw,
    eval_rate,
    load_triplet,
    save_triplet,
    validate,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
