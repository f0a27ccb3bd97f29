"""Truncated log-Laplace exponent and the Esscher root.

``Lambda_eps(u) = sigma2 u^2 / 2 + b_eps u + int_{[-eps,eps]} (e^{ux} - 1 - ux) nu(dx)``
is the cumulant function of ``X_1`` with the jumps larger than ``eps``
removed.  Its minimiser ``u_eps`` (the root of ``Lambda_eps'``) defines
the exponential tilt that turns the truncated process into a martingale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .calculus import (
    OVERFLOW,
    Variant,
    abs_moment,
    effective_drift,
    side_moment,
    tilted_increment,
    tilted_integral,
    truncated_drift,
)
from .model import LevyTriplet

MAX_BISECTIONS = 10_000
_MAX_DOUBLINGS = 2_000


class NumericalFailure(RuntimeError):
    """The root search hit its iteration cap."""


@dataclass(frozen=True)
class EsscherSolution:
    """Root of ``Lambda_eps'`` and the quantities derived from it."""

    eps: float
    u_eps: float
    lambda_at_root: float
    lambda2_at_root: float
    fbar: float
    b_eps: float
    residual: float
    iterations: int = 0


@dataclass(frozen=True)
class NoRoot:
    """``Lambda_eps'`` has no zero.

    ``reason`` is ``"subordinator"`` (zero-drift subordinator: the infimum
    sits at ``u -> -inf``), ``"neg_subordinator"`` (its mirror image) or
    ``"no_sdp"`` (the drift pushes the path out of every small strip).
    """

    eps: float
    reason: str
    b_eps: float
    message: str = ""

    def __bool__(self) -> bool:
        return False


def lambda_eps(triplet: LevyTriplet, eps: float, u: float) -> float:
    """``Lambda_eps(u)``; ``inf`` flags overflow of the tilt."""
    if u == 0.0:
        return 0.0
    b_eps = truncated_drift(triplet, eps)
    comp = tilted_integral(triplet, eps, u, Variant.COMPENSATED2)
    return 0.5 * triplet.sigma2 * u * u + b_eps * u + comp


def lambda_eps_deriv(triplet: LevyTriplet, eps: float, u: float, order: int = 1) -> float:
    """Analytic first or second derivative of :func:`lambda_eps`."""
    if order == 1:
        b_eps = truncated_drift(triplet, eps)
        return triplet.sigma2 * u + b_eps + tilted_integral(triplet, eps, u, Variant.COMPENSATED1X)
    if order == 2:
        return triplet.sigma2 + tilted_integral(triplet, eps, u, Variant.MOMENT2_TILTED)
    raise ValueError("order must be 1 or 2")


def lambda_eps_increment(triplet: LevyTriplet, eps: float, u: float, delta: float) -> float:
    """``Lambda_eps(u + delta) - Lambda_eps(u)`` without cancellation.

    For ``|delta| eps <= 1`` the difference is assembled as
    ``delta Lambda'(u) + sigma2 delta^2 / 2 + int e^{ux}(e^{delta x} - 1 - delta x) nu``;
    otherwise the two values are subtracted directly.
    """
    if abs(delta) * eps > 1.0:
        return lambda_eps(triplet, eps, u + delta) - lambda_eps(triplet, eps, u)
    d1 = lambda_eps_deriv(triplet, eps, u, 1)
    return delta * d1 + 0.5 * triplet.sigma2 * delta * delta + tilted_increment(triplet, eps, u, delta)


def _limits(triplet: LevyTriplet, eps: float, b_eps: float) -> tuple[float, float]:
    """Limits of ``Lambda_eps'`` as ``u -> -inf`` and ``u -> +inf``."""
    if triplet.sigma2 > 0.0:
        return -math.inf, math.inf
    pos_mass = side_moment(triplet, 1, 0.0, eps, 0.0) > 0.0
    neg_mass = side_moment(triplet, -1, 0.0, eps, 0.0) > 0.0
    if pos_mass:
        hi = math.inf
    else:
        hi = b_eps + side_moment(triplet, -1, 0.0, eps, 1.0)
    if neg_mass:
        lo = -math.inf
    else:
        lo = b_eps - side_moment(triplet, 1, 0.0, eps, 1.0)
    return lo, hi


def _drift_sign(triplet: LevyTriplet, value: float) -> int:
    """Sign of a one-sided limit that equals the effective drift."""
    c, err = effective_drift(triplet)
    if triplet.declared_c is not None or math.isfinite(c):
        if abs(c) <= err:
            return 0
        return 1 if c > 0 else -1
    return (value > 0) - (value < 0)


def solve_esscher(
    triplet: LevyTriplet,
    eps: float,
    tol: Optional[float] = None,
    start: float = 0.0,
) -> Union[EsscherSolution, NoRoot]:
    """Find ``u_eps`` with ``Lambda_eps'(u_eps) = 0``.

    Parameters
    ----------
    triplet, eps
        Process and truncation radius.
    tol
        Residual tolerance, default ``1e-10 (1 + |b_eps|)``.
    start
        Starting point of the bracket search (``Lambda_eps'(0) = b_eps``
        gives the direction for free at the default 0).

    Returns
    -------
    EsscherSolution or NoRoot

    Raises
    ------
    NumericalFailure
        If bracketing or bisection exceeds its iteration cap.
    """
    if eps <= 0.0:
        raise ValueError("eps must be > 0")
    b_eps = truncated_drift(triplet, eps)
    if tol is None:
        tol = 1e-10 * (1.0 + abs(b_eps))

    lo_lim, hi_lim = _limits(triplet, eps, b_eps)
    if not (lo_lim < 0.0 < hi_lim):
        # one-sided limits are the effective drift; decide its sign exactly
        if math.isfinite(hi_lim) and math.isfinite(lo_lim):
            # no jumps at all inside [-eps, eps]: Lambda' is constant
            if _drift_sign(triplet, b_eps) == 0:
                return _finish(triplet, eps, 0.0, b_eps, 0)
            return NoRoot(eps, "no_sdp", b_eps, "constant nonzero drift and no small jumps")
        if math.isfinite(hi_lim):
            s = _drift_sign(triplet, hi_lim)
            if s == 0:
                return NoRoot(eps, "neg_subordinator", b_eps, "driftless negative subordinator")
            if s < 0:
                return NoRoot(eps, "no_sdp", b_eps, "negative drift and no small positive jumps")
        else:
            s = _drift_sign(triplet, lo_lim)
            if s == 0:
                return NoRoot(eps, "subordinator", b_eps, "driftless subordinator")
            if s > 0:
                return NoRoot(eps, "no_sdp", b_eps, "positive drift and no small negative jumps")

    def f(u):
        return lambda_eps_deriv(triplet, eps, u, 1)

    f0 = b_eps if start == 0.0 else f(start)
    if abs(f0) <= tol:
        return _finish(triplet, eps, start, b_eps, 0)

    # bracket: walk away from the start against the sign of Lambda'
    d = -1 if f0 > 0 else 1
    a, fa = start, f0
    step = 1.0 / eps
    for _ in range(_MAX_DOUBLINGS):
        b = start + d * step
        fb = f(b)
        if fb == 0.0:
            return _finish(triplet, eps, b, b_eps, 0)
        if (fb > 0) != (fa > 0):
            break
        a, fa = b, fb
        step *= 2.0
    else:
        raise NumericalFailure("could not bracket the root of Lambda_eps'")
    lo, hi = (a, b) if fa < 0 else (b, a)
    u, it = _rtsafe(f, triplet, eps, lo, hi, tol)
    return _finish(triplet, eps, u, b_eps, it)


def _rtsafe(f, triplet, eps, lo, hi, tol):
    """Newton steps on an increasing function, bisection when they misbehave."""
    u = 0.5 * (lo + hi)
    fu = f(u)
    best, fbest = u, abs(fu)
    bisections = 0
    for it in range(4 * MAX_BISECTIONS):
        if abs(fu) <= tol:
            return u, it
        if fu < 0:
            lo = u
        else:
            hi = u
        d2 = lambda_eps_deriv(triplet, eps, u, 2)
        newton = u - fu / d2 if d2 > 0 and math.isfinite(fu) else math.nan
        if lo < newton < hi:
            u_new = newton
        else:
            u_new = 0.5 * (lo + hi)
            bisections += 1
            if bisections > MAX_BISECTIONS:
                raise NumericalFailure("bisection cap exceeded in the Esscher solve")
        if u_new == u or not lo <= u_new <= hi or hi - lo <= 4e-16 * max(abs(lo), abs(hi)):
            # bracket collapsed to floating point resolution
            return (best if fbest <= abs(fu) else u), it
        u = u_new
        fu = f(u)
        if abs(fu) < fbest:
            best, fbest = u, abs(fu)
    raise NumericalFailure("iteration cap exceeded in the Esscher solve")


def _finish(triplet, eps, u, b_eps, iterations) -> EsscherSolution:
    lam = lambda_eps(triplet, eps, u)
    lam2 = lambda_eps_deriv(triplet, eps, u, 2)
    res = abs(lambda_eps_deriv(triplet, eps, u, 1))
    if abs(u) * eps >= OVERFLOW:
        raise NumericalFailure("root lies beyond the overflow guard")
    if res > 1e-6 * (1.0 + abs(b_eps)) + 1e-12 * abs(u) * lam2:
        raise NumericalFailure(f"Esscher solve stalled with residual {res:.3g}")
    return EsscherSolution(eps, u, lam, lam2, lam2 / (eps * eps), b_eps, res, iterations)


def untilted_F(triplet: LevyTriplet, eps: float) -> float:
    """``F(eps) = eps^-2 (sigma2 + int_{|x|<=eps} x^2 nu(dx))``."""
    return (triplet.sigma2 + abs_moment(triplet, eps, 2.0)) / (eps * eps)
