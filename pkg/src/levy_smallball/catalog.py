"""Closed-form rates for named process families.

Each family knows its triplet (so that the generic bounds can be compared
with the closed form) and :func:`asymptotic_rate` maps it to a
:class:`~levy_smallball.model.RateExpression`.  Regime boundaries such as
``alpha1 == 1`` are tested on the declared parameters with exact rational
arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .calculus import Variant, side_moment, tail_mass, tilted_integral, total_mass
from .classify import classify
from .model import (
    NEGATIVE,
    POSITIVE,
    Atom,
    LevyTriplet,
    RateExpression,
    TemperedPowerLaw,
)
from .special import power_exp_integral, regularized_lower_gamma


@dataclass(frozen=True)
class NoRate:
    """Distinguished value for families without the small deviation property."""

    reason: str

    def __str__(self) -> str:
        return f"no rate ({self.reason})"

    def __bool__(self) -> bool:
        return False


def _q(x: float) -> Fraction:
    return Fraction(x)


# ----------------------------------------------------------------- families


@dataclass(frozen=True)
class StableSubordinatorDrift:
    """Jumps ``C x^(-1-alpha) dx`` on ``(0, inf)`` plus effective drift ``mu``."""

    alpha: float
    mu: float = 0.0
    C: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")

    def triplet(self) -> LevyTriplet:
        comp = TemperedPowerLaw(self.C, self.alpha, 0.0, POSITIVE, math.inf)
        return LevyTriplet.from_effective_drift([comp], self.mu)


@dataclass(frozen=True)
class GammaDrift:
    """Gamma subordinator ``b e^{-x/a} / x dx`` plus effective drift ``mu``."""

    a: float
    b: float
    mu: float = 0.0

    def __post_init__(self):
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("a and b must be > 0")

    def triplet(self) -> LevyTriplet:
        comp = TemperedPowerLaw(self.b, 0.0, 1.0 / self.a, POSITIVE, math.inf)
        return LevyTriplet.from_effective_drift([comp], self.mu)


@dataclass(frozen=True)
class PolynomialMeasure:
    """``C1 x^(-1-alpha1)`` on ``(0, 1]`` and ``C2 |x|^(-1-alpha2)`` on ``[-1, 0)``.

    Exactly one of ``b`` (compensated drift) and ``c`` (effective drift,
    only when both exponents are below 1) is given; ``b`` defaults to 0.
    """

    alpha1: float
    alpha2: float
    C1: float = 1.0
    C2: float = 1.0
    b: Optional[float] = None
    c: Optional[float] = None

    def __post_init__(self):
        if not (self.alpha1 < 2.0 and self.alpha2 < 2.0):
            raise ValueError("exponents must be < 2")
        if self.C1 < 0.0 or self.C2 < 0.0 or self.C1 + self.C2 == 0.0:
            raise ValueError("need C1, C2 >= 0 and C1 + C2 > 0")
        if self.b is not None and self.c is not None:
            raise ValueError("give b or c, not both")

    def triplet(self) -> LevyTriplet:
        comps = [
            TemperedPowerLaw(self.C1, self.alpha1, 0.0, POSITIVE, 1.0),
            TemperedPowerLaw(self.C2, self.alpha2, 0.0, NEGATIVE, 1.0),
        ]
        if self.c is not None:
            return LevyTriplet.from_effective_drift(comps, self.c)
        return LevyTriplet(tuple(comps), 0.0, 0.0 if self.b is None else self.b)

    def normalized(self) -> "PolynomialMeasure":
        """Reflect if needed so that ``alpha1 > alpha2`` or ``C1 >= C2`` on ties."""
        a1, a2 = _q(self.alpha1), _q(self.alpha2)
        if a2 > a1 or (a1 == a2 and _q(self.C2) > _q(self.C1)):
            neg = lambda v: None if v is None else -v
            return PolynomialMeasure(self.alpha2, self.alpha1, self.C2, self.C1, neg(self.b), neg(self.c))
        return self

    def exact_c(self) -> Optional[Fraction]:
        """Effective drift in exact arithmetic (``None`` without finite first moment)."""
        if self.c is not None:
            return _q(self.c)
        a1, a2 = _q(self.alpha1), _q(self.alpha2)
        if a1 >= 1 and self.C1 > 0 or a2 >= 1 and self.C2 > 0:
            return None
        b = _q(0.0 if self.b is None else self.b)
        m = (_q(self.C1) / (1 - a1) if self.C1 > 0 else 0) - (_q(self.C2) / (1 - a2) if self.C2 > 0 else 0)
        return b - m


@dataclass(frozen=True)
class VarianceGamma:
    """``C1 e^{-lam1 x} / x`` on ``x > 0`` and ``C2 e^{-lam2 |x|} / |x|`` on ``x < 0``.

    ``c`` is the effective drift; a time-changed Brownian motion with drift
    has ``c = 0``.  The symmetric case (``C1 = C2``, ``lam1 = lam2``) is the
    one where the Brownian drift vanishes.
    """

    C1: float
    C2: float
    lam1: float
    lam2: float
    c: float = 0.0

    def __post_init__(self):
        if min(self.C1, self.C2, self.lam1, self.lam2) <= 0.0:
            raise ValueError("all parameters must be > 0")

    @property
    def mu_is_zero(self) -> bool:
        return self.C1 == self.C2 and self.lam1 == self.lam2

    def triplet(self) -> LevyTriplet:
        comps = [
            TemperedPowerLaw(self.C1, 0.0, self.lam1, POSITIVE, math.inf),
            TemperedPowerLaw(self.C2, 0.0, self.lam2, NEGATIVE, math.inf),
        ]
        return LevyTriplet.from_effective_drift(comps, self.c, declared_symmetric=self.mu_is_zero)


@dataclass(frozen=True)
class SubordinatedBM:
    """``B(A_t)`` for a subordinator ``A`` with Laplace exponent
    ``b_A u + C Gamma(1 - gamma) / gamma * u^gamma`` (stable jumps of index
    ``gamma``); ``gamma = 1`` means ``A`` is the pure drift ``b_A``.
    ``sigma2`` is the extra Gaussian variance entering the drift term.
    """

    gamma: float
    b_A: float = 0.0
    C: float = 1.0
    sigma2: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise ValueError("gamma must lie in (0, 1]")
        if self.b_A < 0.0:
            raise ValueError("b_A must be >= 0")

    def subordinator_components(self) -> tuple:
        if self.gamma == 1.0:
            return ()
        return (TemperedPowerLaw(self.C, self.gamma, 0.0, POSITIVE, math.inf),)

    def triplet(self) -> LevyTriplet:
        """The symmetric triplet of ``B(A_t)``: a ``2 gamma``-stable measure."""
        comps = []
        if self.gamma < 1.0:
            k = self.C * 2.0**self.gamma * math.gamma(self.gamma + 0.5) / math.sqrt(math.pi)
            a = 2.0 * self.gamma
            comps = [
                TemperedPowerLaw(k, a, 0.0, POSITIVE, math.inf),
                TemperedPowerLaw(k, a, 0.0, NEGATIVE, math.inf),
            ]
        return LevyTriplet(tuple(comps), self.b_A + self.sigma2, 0.0, declared_symmetric=True)


@dataclass(frozen=True)
class CompoundPoissonNoDrift:
    """Finite Lévy measure with zero effective drift."""

    components: tuple = field(default_factory=tuple)

    def triplet(self) -> LevyTriplet:
        return LevyTriplet.from_effective_drift(self.components, 0.0)


@dataclass(frozen=True)
class StrictlyStable:
    """Symmetric ``alpha``-stable measure ``C |x|^(-1-alpha)`` on both sides."""

    alpha: float
    C: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError("alpha must lie in (0, 2)")

    def triplet(self) -> LevyTriplet:
        comps = [
            TemperedPowerLaw(self.C, self.alpha, 0.0, POSITIVE, math.inf),
            TemperedPowerLaw(self.C, self.alpha, 0.0, NEGATIVE, math.inf),
        ]
        return LevyTriplet(tuple(comps), 0.0, 0.0, declared_symmetric=True)


NamedFamily = Union[
    StableSubordinatorDrift,
    GammaDrift,
    PolynomialMeasure,
    VarianceGamma,
    SubordinatedBM,
    CompoundPoissonNoDrift,
    StrictlyStable,
]


# -------------------------------------------------------------------- rates


def _weak(p=0.0, q=0.0, r=0.0, regime="") -> RateExpression:
    return RateExpression(float(p), float(q), float(r), "weak", None, regime)


def asymptotic_rate(family: NamedFamily) -> Union[RateExpression, NoRate]:
    """Weak (or, where known, strong) rate of ``-log P(sup|X| <= eps)``."""
    if isinstance(family, StableSubordinatorDrift):
        mu = _q(family.mu)
        if mu == 0:
            a = _q(family.alpha)
            return _weak(float(a / (1 - a)), regime="stable subordinator, no drift")
        if mu < 0:
            return _weak(1, 1, regime="stable subordinator, negative drift")
        return NoRate("positive drift and only positive jumps")

    if isinstance(family, GammaDrift):
        mu = _q(family.mu)
        if mu < 0:
            return _weak(1, 1, regime="gamma, negative drift")
        if mu == 0:
            return _weak(0, 1, regime="gamma, no drift: polynomial probability (see gamma_exact)")
        return NoRate("positive drift and only positive jumps")

    if isinstance(family, PolynomialMeasure):
        return _polynomial_rate(family.normalized())

    if isinstance(family, VarianceGamma):
        if _q(family.c) == 0:
            return _weak(0, 1, regime="variance gamma, no effective drift")
        return _weak(1, 1, regime="variance gamma, nonzero effective drift")

    if isinstance(family, SubordinatedBM):
        if family.gamma == 1.0 or family.b_A > 0.0 or family.sigma2 > 0.0:
            return _weak(2, regime="subordinated BM, Gaussian part")
        return _weak(2.0 * family.gamma, regime="subordinated BM, stable subordinator")

    if isinstance(family, CompoundPoissonNoDrift):
        m = total_mass(family.components)
        return RateExpression(0.0, 0.0, 0.0, "strong", m, "compound Poisson, no drift")

    if isinstance(family, StrictlyStable):
        return _weak(family.alpha, regime="strictly stable")

    raise TypeError(f"unknown family {type(family).__name__}")


def _polynomial_rate(f: PolynomialMeasure) -> Union[RateExpression, NoRate]:
    a1, a2 = _q(f.alpha1), _q(f.alpha2)
    C1, C2 = _q(f.C1), _q(f.C2)
    if a1 > 1:
        return _weak(f.alpha1, regime="alpha1 > 1")
    if a1 == 1:
        if a2 < 1 or C1 > C2:
            return _weak(1, 1, 1, regime="alpha1 = 1, asymmetric")
        return _weak(1, regime="alpha1 = alpha2 = 1, C1 = C2")
    if a1 <= 0:
        return NoRate("maximal exponent <= 0 is outside the polynomial regimes")
    c = f.exact_c()
    if c != 0:
        return _weak(1, 1, regime="alpha1 < 1, c != 0")
    return _weak(f.alpha1, regime="alpha1 < 1, c = 0")


def tauberian_subordinator_rate(triplet: LevyTriplet) -> RateExpression:
    """``eps^(-alpha/(1-alpha))`` for a driftless subordinator with power-law jumps.

    The index ``alpha`` is the largest singularity exponent of the
    power-law components (tempering and cutoffs do not change the
    behaviour of the Laplace exponent at infinity).
    """
    cls = classify(triplet)
    if not cls.is_subordinator or not cls.c_is_zero():
        raise ValueError("needs a subordinator with zero effective drift")
    alphas = [c.alpha for c in triplet.components if isinstance(c, TemperedPowerLaw) and c.C > 0.0]
    if len(alphas) != len(triplet.components) or not alphas:
        raise ValueError("Laplace exponent is not a pure power law")
    a = max(alphas)
    if not 0.0 < a < 1.0:
        raise ValueError("index must lie in (0, 1)")
    a = _q(a)
    return _weak(float(a / (1 - a)), regime="driftless subordinator, regularly varying Laplace exponent")


def poisson_tail_bound(measure, eps: float) -> float:
    """Chebyshev bound ``n (log(n / f) - 1) + f``, ``n = 1/eps - 1``, ``f = nu(0, eps]``.

    A lower bound on ``-log P(sup|X| <= eps/2)`` for a compound Poisson
    process with positive jumps and drift ``-1 + int_0^1 x nu(dx)``.
    ``inf`` when no jump of size ``<= eps`` exists, 0 when ``n <= f``.
    """
    f = side_moment(measure, 1, 0.0, eps, 0.0)
    n = 1.0 / eps - 1.0
    if f == 0.0:
        return math.inf
    if n <= f:
        return 0.0
    return n * (math.log(n / f) - 1.0) + f


def gamma_exact(a: float, b: float, eps: float) -> float:
    """``P(sup_{[0,1]} X <= eps) = P(X_1 <= eps)`` for the driftless Gamma process.

    ``X_1`` is Gamma distributed with shape ``b`` and scale ``a``.
    """
    return regularized_lower_gamma(b, eps / a)


def fit_gamma_exponent(a: float, b: float, eps_values: Sequence[float]) -> float:
    """Least-squares slope of ``log gamma_exact`` against ``log eps``."""
    x = np.log(np.asarray(eps_values, dtype=float))
    y = np.log([gamma_exact(a, b, e) for e in eps_values])
    return float(np.polyfit(x, y, 1)[0])


def laplace_exponent(components, b_A: float, u: float) -> float:
    """``Phi(u) = b_A u + int_0^inf (1 - e^{-ux}) nu_A(dx)`` for ``u >= 0``."""
    parts = [b_A * u]
    for c in components:
        if isinstance(c, TemperedPowerLaw):
            if c.side != POSITIVE:
                raise ValueError("subordinator jumps must be positive")
            near = min(c.cutoff, 1.0)
            parts.append(-tilted_integral([c], near, -u, Variant.COMPENSATED1))
            if c.cutoff > 1.0:
                far = power_exp_integral(-c.alpha, c.lam, 1.0, c.cutoff)
                far_u = power_exp_integral(-c.alpha, c.lam + u, 1.0, c.cutoff)
                if math.isinf(far):
                    raise ValueError("Laplace exponent diverges")
                parts.append(c.C * (far - far_u))
        elif isinstance(c, Atom):
            if c.location <= 0.0:
                raise ValueError("subordinator jumps must be positive")
            parts.append(-c.mass * math.expm1(-u * c.location))
        else:
            raise TypeError("numeric densities are not supported here")
    return math.fsum(parts)


def subordinated_rate_terms(components, sigma2: float, b_A: float, eps: float) -> float:
    """``Phi(eps^-2) + b_A {eps^-2 (sigma2 + int_0^eps x^2 nu_A) + nu_A(|x| > eps)}``."""
    phi = laplace_exponent(components, b_A, eps**-2)
    extra = 0.0
    if b_A > 0.0:
        m2 = side_moment(components, 1, 0.0, eps, 2.0)
        extra = b_A * ((sigma2 + m2) / eps**2 + tail_mass(components, eps))
    return phi + extra


FAMILIES = {
    "stable_subordinator": StableSubordinatorDrift,
    "gamma": GammaDrift,
    "polynomial": PolynomialMeasure,
    "variance_gamma": VarianceGamma,
    "subordinated_bm": SubordinatedBM,
    "strictly_stable": StrictlyStable,
}
