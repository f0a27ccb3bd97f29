"""Two-sided exponent bounds for small-ball probabilities.

For a truncation radius ``eps`` the bounds combine four costs:

* ``N = nu({|x| > eps})``, the price of having no large jump,
* ``-Lambda_eps(u_eps)``, the Esscher (drift) cost,
* ``eps |u_eps|``, the change-of-measure slack,
* ``Fbar = eps^-2 Lambda_eps''(u_eps)``, the oscillation cost of the
  tilted martingale,

and give ``P(sup|X| <= 3 eps) >= exp(-upper)`` and
``P(sup|X| <= eps/2) <= exp(-max(lower, 0))``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional, Union

from .calculus import abs_moment, effective_drift, side_moment, tail_mass
from .esscher import NoRoot, solve_esscher
from .model import LevyTriplet, RateExpression

DOMINANT_TERMS = ("tail", "esscher", "oscillation")


@dataclass(frozen=True)
class BoundReport:
    """All cost terms and both exponent bounds at one radius.

    ``upper_exponent`` bounds ``-log P(sup|X| <= 3 eps)`` from above,
    ``lower_exponent`` bounds ``-log P(sup|X| <= eps/2)`` from below (clamped
    at 0; the raw value is kept in ``lower_exponent_raw``).
    """

    eps: float
    N: float
    esscher_cost: float
    tilt: float
    fbar: float
    upper_exponent: float
    lower_exponent: float
    lower_exponent_raw: float
    dominant: str
    tight: bool
    u_eps: float
    tightness_ratio: float

    @property
    def total(self) -> float:
        """``N - Lambda_eps(u_eps) + Fbar``."""
        return self.N + self.esscher_cost + self.fbar

    def to_dict(self) -> dict:
        return asdict(self)


def _dominant(N: float, ess: float, fbar: float) -> str:
    # ties resolve to the Esscher term
    if ess >= N and ess >= fbar:
        return "esscher"
    return "tail" if N > fbar else "oscillation"


def theorem15(
    triplet: LevyTriplet, eps: float, tight_ratio: float = 0.1
) -> Union[BoundReport, NoRoot]:
    """Exponent bounds at radius ``eps``; a :class:`NoRoot` is passed through."""
    sol = solve_esscher(triplet, eps)
    if isinstance(sol, NoRoot):
        return sol
    N = tail_mass(triplet, eps)
    ess = max(-sol.lambda_at_root, 0.0) + 0.0  # no signed zero
    tilt = eps * abs(sol.u_eps)
    fbar = sol.fbar
    upper = N + ess + 3.0 * tilt + 10.0 * fbar + 3.0
    lower_raw = N + ess - 0.5 * tilt + fbar / 12.0 - 1.0
    denom = N + ess + fbar
    ratio = tilt / denom if denom > 0.0 else (0.0 if tilt == 0.0 else math.inf)
    return BoundReport(
        eps=eps,
        N=N,
        esscher_cost=ess,
        tilt=tilt,
        fbar=fbar,
        upper_exponent=upper,
        lower_exponent=max(lower_raw, 0.0),
        lower_exponent_raw=lower_raw,
        dominant=_dominant(N, ess, fbar),
        tight=ratio < tight_ratio,
        u_eps=sol.u_eps,
        tightness_ratio=ratio,
    )


def F_of(measure, sigma2: float, eps: float) -> float:
    """``eps^-2 (sigma2 + int_{|x|<=eps} x^2 nu(dx))``."""
    return (sigma2 + abs_moment(measure, eps, 2.0)) / (eps * eps)


def martingale_bounds(measure, sigma2: float, eps: float, drift: float = 0.0) -> tuple[float, float]:
    """Exit-time exponents for a martingale with jumps in ``[-eps, eps]``.

    Returns ``(10 F + 3, F / 12 - 1)``: ``P(sup|X| <= 3 eps) >= e^{-(10F+3)}``
    and ``P(sup|X| <= eps/2) <= e^{-(F/12 - 1)}``.  Only jumps inside
    ``[-eps, eps]`` enter ``F``.
    """
    if drift != 0.0:
        raise ValueError("martingale_bounds needs a driftless (compensated) input")
    F = F_of(measure, sigma2, eps)
    return 10.0 * F + 3.0, F / 12.0 - 1.0


def symmetric_rate(triplet: LevyTriplet, eps: float) -> float:
    """``N(eps) + F(eps)``, weakly equivalent to ``-log P(sup|X| <= eps)``
    for symmetric processes."""
    if not triplet.is_symmetric() or triplet.b != 0.0:
        raise ValueError("symmetric_rate needs a symmetric measure and b = 0")
    return tail_mass(triplet, eps) + F_of(triplet, triplet.sigma2, eps)


def doubling_check(triplet: LevyTriplet, eps: float) -> float:
    """``(N(eps) + F(eps)) / (N(2 eps) + F(2 eps))``, which always lies in [1, 4]."""
    num = tail_mass(triplet, eps) + F_of(triplet, triplet.sigma2, eps)
    den = tail_mass(triplet, 2.0 * eps) + F_of(triplet, triplet.sigma2, 2.0 * eps)
    if den == 0.0:
        raise ZeroDivisionError("N + F vanishes at 2 eps (empty measure and sigma2 = 0)")
    r = num / den
    if not 1.0 - 1e-9 <= r <= 4.0 + 1e-9:
        raise ArithmeticError(f"doubling ratio {r!r} outside [1, 4]")
    return r


def gaussian_rate(sigma2: float) -> RateExpression:
    """``pi^2 sigma2 / 8 * eps^-2``, valid whenever a Gaussian part is present."""
    if not sigma2 > 0.0:
        raise ValueError("gaussian_rate needs sigma2 > 0")
    return RateExpression(2.0, 0.0, 0.0, "strong", math.pi**2 * sigma2 / 8.0, "gaussian")


class Tightness(NamedTuple):
    tight: bool
    ratio: float
    margin: float


def tightness_check(report: BoundReport, max_ratio: float = 0.1) -> Tightness:
    """Is ``eps |u_eps|`` small against ``N - Lambda_eps(u_eps) + Fbar``?"""
    r = report.tightness_ratio
    return Tightness(r < max_ratio, r, max_ratio - r)


@dataclass(frozen=True)
class NegligibilityReport:
    """Outcome of the two sufficient conditions for a negligible tilt.

    Case (a) applies when ``b_eps <= 0`` (or, mirrored, ``b_eps >= 0``) and
    checks ``u^2 int_0^eps x^2 nu(dx) <= -2 Lambda_eps(u_eps)`` on the side
    the tilt points to.  Case (b) applies to type (I) processes with
    ``c != 0`` once ``int_{|x|<=eps} |x| nu(dx) <= |c|/2`` and checks
    ``|c u_eps| <= -4 Lambda_eps(u_eps)``.  Slacks are right minus left.
    """

    eps: float
    case_a: bool
    slack_a: Optional[float]
    case_b: bool
    slack_b: Optional[float]
    note: str = ""


def negligibility_check(triplet: LevyTriplet, eps: float) -> NegligibilityReport:
    sol = solve_esscher(triplet, eps)
    if isinstance(sol, NoRoot):
        return NegligibilityReport(eps, False, None, False, None, f"no root: {sol.reason}")
    u, lam = sol.u_eps, sol.lambda_at_root
    # (a): with b_eps <= 0 the tilt is positive and only positive jumps enter
    side = 1 if sol.b_eps <= 0.0 else -1
    m2 = side_moment(triplet, side, 0.0, eps, 2.0)
    slack_a = -2.0 * lam - u * u * m2
    notes = ["a" if side > 0 else "a(mirrored)"]

    case_b, slack_b = False, None
    m1 = abs_moment(triplet, eps, 1.0)
    if triplet.sigma2 == 0.0 and math.isfinite(abs_moment(triplet, 1.0, 1.0)):
        c, err = effective_drift(triplet)
        if abs(c) > err and m1 <= abs(c) / 2.0:
            case_b = True
            slack_b = -4.0 * lam - abs(c * u)
            notes.append("b")
    return NegligibilityReport(eps, True, slack_a, case_b, slack_b, ",".join(notes))
