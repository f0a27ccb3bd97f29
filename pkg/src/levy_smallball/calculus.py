"""Integral functionals of Lévy measures.

Tail masses, truncated moments and exponentially tilted integrals over
``[-eps, eps]``.  Power-law components are reduced to the unit interval
(``x = +-h y`` with ``h = min(eps, cutoff)``) and evaluated through
:func:`unit_kernel`, atoms pointwise, numeric densities by quadrature.

Tilted integrals return ``+-math.inf`` when the tilt overflows
(``u x > 700`` somewhere in the range) and raise
:class:`DivergentIntegralError` when the requested moment does not exist.
"""

from __future__ import annotations

import enum
import math
from typing import Iterable, NamedTuple, Optional

import numpy as np
from scipy import integrate

from .model import Atom, LevyTriplet, NumericDensity, TemperedPowerLaw
from .special import power_exp_integral, shifted_moments

OVERFLOW = 700.0
_QUAD_ABS = 1e-11
_QUAD_REL = 1e-10


class DivergentIntegralError(ValueError):
    """The requested integral is infinite near the origin."""


class Variant(str, enum.Enum):
    """Integrand families over ``[-eps, eps]``.

    plain          e^{ux}
    compensated1   e^{ux} - 1
    compensated1x  (e^{ux} - 1) x
    compensated2   e^{ux} - 1 - ux
    moment2_tilted x^2 e^{ux}
    """

    PLAIN = "plain"
    COMPENSATED1 = "compensated1"
    COMPENSATED1X = "compensated1x"
    COMPENSATED2 = "compensated2"
    MOMENT2_TILTED = "moment2_tilted"

    @property
    def power(self) -> int:
        """Power of x multiplying the exponential part."""
        return _VARIANT_PK[self][0]

    @property
    def order(self) -> int:
        """Number of Taylor terms removed from e^{ux}."""
        return _VARIANT_PK[self][1]

    @property
    def threshold(self) -> int:
        """A power law with singularity exponent alpha converges iff alpha < threshold."""
        return self.power + self.order


_VARIANT_PK = {
    Variant.PLAIN: (0, 0),
    Variant.COMPENSATED1: (0, 1),
    Variant.COMPENSATED1X: (1, 1),
    Variant.COMPENSATED2: (0, 2),
    Variant.MOMENT2_TILTED: (2, 0),
}


def _components(measure) -> tuple:
    if isinstance(measure, LevyTriplet):
        return measure.components
    if isinstance(measure, (TemperedPowerLaw, Atom, NumericDensity)):
        return (measure,)
    return tuple(measure)


# ------------------------------------------------------------ unit kernel


def unit_kernel(s: float, k0: int, gamma: float, kappa: float = 0.0) -> float:
    """``int_0^1 y^(s-1) e^{-kappa y} [e^{gamma y} - sum_{k<k0} (gamma y)^k / k!] dy``.

    Needs ``s + k0 > 0`` and ``kappa >= 0``.  Returns ``math.inf`` when
    ``gamma > 700``.  For ``gamma >= -4`` the exponential is expanded as a
    power series; for more negative tilts the range is split at
    ``4 / |gamma|`` so that the series piece stays short and the tail piece
    is an incomplete-gamma difference without cancellation.
    """
    if s + k0 <= 0.0:
        raise DivergentIntegralError(f"unit kernel diverges for s={s:g}, k0={k0}")
    if gamma > OVERFLOW:
        return math.inf
    if gamma == 0.0:
        return power_exp_integral(s, kappa, 0.0, 1.0) if k0 == 0 else 0.0
    if gamma >= -4.0:
        g = abs(gamma)
        n = k0 + int(math.ceil(g + 10.0 * math.sqrt(g) + 30.0))
        moments = shifted_moments(s, kappa, k0, n)
        coef = 1.0
        for k in range(1, k0 + 1):
            coef *= gamma / k
        terms = []
        for k, m in zip(range(k0, n), moments):
            terms.append(coef * m)
            coef *= gamma / (k + 1)
        return math.fsum(terms)
    if k0 == 0:
        return power_exp_integral(s, kappa - gamma, 0.0, 1.0)
    y0 = 4.0 / -gamma
    head = y0**s * unit_kernel(s, k0, -4.0, kappa * y0)
    tail = [power_exp_integral(s, kappa - gamma, y0, 1.0)]
    coef = 1.0
    for k in range(k0):
        tail.append(-coef * power_exp_integral(s + k, kappa, y0, 1.0))
        coef *= gamma / (k + 1)
    return head + math.fsum(tail)


def exp_remainder(z: float, n: int) -> float:
    """``e^z - sum_{k<n} z^k / k!`` without cancellation for small ``|z|``."""
    if z > OVERFLOW:
        return math.inf
    if abs(z) < 2.0 + n:
        term = 1.0
        for k in range(1, n + 1):
            term *= z / k
        total = 0.0
        k = n
        while True:
            total += term
            k += 1
            term *= z / k
            if abs(term) <= 1e-17 * abs(total) or k > n + 200:
                break
        return total
    total = math.exp(z)
    coef = 1.0
    for k in range(n):
        total -= coef
        coef *= z / (k + 1)
    return total


def integrand(variant: Variant, u: float, x: float) -> float:
    """Pointwise integrand of ``variant`` at jump size ``x``."""
    z = u * x
    if z > OVERFLOW:
        return math.inf if (variant.power % 2 == 0 or x > 0) else -math.inf
    if variant is Variant.PLAIN:
        return math.exp(z)
    if variant is Variant.COMPENSATED1:
        return math.expm1(z)
    if variant is Variant.COMPENSATED1X:
        return math.expm1(z) * x
    if variant is Variant.COMPENSATED2:
        return exp_remainder(z, 2) if abs(z) < 0.5 else math.expm1(z) - z
    return x * x * math.exp(z)


# ---------------------------------------------------------- tilted integrals


def _power_law_tilted(c: TemperedPowerLaw, eps: float, u: float, variant: Variant) -> float:
    if c.C == 0.0:
        return 0.0
    p, k0 = variant.power, variant.order
    if not c.alpha < p + k0:
        raise DivergentIntegralError(
            f"{variant.value} diverges for a power law with alpha={c.alpha:g}"
        )
    h = min(eps, c.cutoff)
    gamma = c.sign * u * h
    kern = unit_kernel(p - c.alpha, k0, gamma, c.lam * h)
    if math.isinf(kern):
        return kern * (c.sign**p)
    return c.C * h ** (p - c.alpha) * kern * (c.sign**p)


def _atom_tilted(a: Atom, eps: float, u: float, variant: Variant) -> float:
    if abs(a.location) > eps:
        return 0.0
    return a.mass * integrand(variant, u, a.location)


def _magnitude_range(c: NumericDensity, sign: int) -> tuple[float, float]:
    lo, hi = c.support
    if sign > 0:
        return max(lo, 0.0), max(hi, 0.0)
    return max(-hi, 0.0), max(-lo, 0.0)


_W_FLOOR = 690.0  # y = B e^{-w} stays a normal float up to here


def _numeric_side(c: NumericDensity, sign: int, a: float, b: float, fn, boundary: bool = False) -> tuple[float, float]:
    """``int_{a < y <= b} density(sign y) fn(y) dy`` over the support.

    ``boundary`` marks an integrand whose power part is exactly ``y^-1`` at
    0, so convergence rests on a slowly varying factor.  The integral is
    then taken up to the float floor and the rest extrapolated from a power
    fit in ``w = log(B / y)``; a fitted decay no faster than ``w^-1`` is
    reported as ``inf``.
    """
    lo_m, hi_m = _magnitude_range(c, sign)
    A, B = max(a, lo_m), min(b, hi_m)
    if not B > A:
        return 0.0, 0.0
    f = c.density

    def g(y):
        return f(sign * y) * fn(y)

    if A == 0.0:
        if math.isinf(B):
            v1, e1 = _numeric_side(c, sign, 0.0, 1.0, fn, boundary)
            v2, e2 = _numeric_side(c, sign, 1.0, B, fn)
            return v1 + v2, e1 + e2
        # y = B e^{-w} spreads the singular end over a half line
        def h(w):
            y = B * math.exp(-w)
            v = g(y) * y if y > 0.0 else 0.0
            # convergent integrands vanish at 0; an infinite density there
            # only reflects overflow of the density alone
            return v if math.isfinite(v) or y > 1e-100 else 0.0

        if boundary:
            return _boundary_integral(h, -math.log(B))
        val, err = integrate.quad(
            h,
            0.0,
            math.inf,
            epsabs=_QUAD_ABS,
            epsrel=_QUAD_REL,
            limit=400,
        )
        return val, err
    if math.isfinite(B) and B > 1e3 * A:
        # y = A e^w for ranges spanning many decades
        def k(w):
            y = A * math.exp(w)
            return g(y) * y

        val, err = integrate.quad(k, 0.0, math.log(B / A), epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=400)
        return val, err
    val, err = integrate.quad(g, A, B, epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=400)
    return val, err


def _finite_or_nan(h, w):
    try:
        v = h(w)
    except (OverflowError, ZeroDivisionError):
        return math.nan
    return v if math.isfinite(v) else math.nan


def _boundary_integral(h, offset: float) -> tuple[float, float]:
    # deepest point where the user density can still be evaluated
    w2 = _W_FLOOR
    while math.isnan(_finite_or_nan(h, w2)) and w2 > 8.0:
        w2 *= 0.8
    w1 = w2 / 4.0
    h1, h2 = _finite_or_nan(h, w1), _finite_or_nan(h, w2)
    if math.isnan(h1) or math.isnan(h2):
        raise DivergentIntegralError("numeric density cannot be evaluated near the origin")
    if h2 <= 0.0:
        tail = 0.0
    elif h1 <= 0.0:
        return math.inf, 0.0
    else:
        # power fit in log(1 / y) = w + offset
        L1, L2 = w1 + offset, w2 + offset
        if not L1 > 0.0:
            L1, L2 = w1, w2
        q = math.log(h1 / h2) / math.log(L2 / L1)
        if q <= 1.0 + 1e-3:
            return math.inf, 0.0
        tail = h2 * L2 / (q - 1.0)
    pts = np.geomspace(1.0, w2, 12)
    val = err = 0.0
    for lo, hi in zip(np.r_[0.0, pts[:-1]], pts):
        v, e = integrate.quad(h, lo, hi, epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=200)
        val += v
        err += e
    # the tail fit is only as good as the fitted exponent
    return val + tail, err + 0.1 * abs(tail)


def _numeric_near_zero(c: NumericDensity, sign: int) -> bool:
    return c.near_zero_positive if sign > 0 else c.near_zero_negative


def _numeric_tilted(c: NumericDensity, eps: float, u: float, variant: Variant) -> tuple[float, float]:
    total = err = 0.0
    for sign in (1, -1):
        edge = _numeric_near_zero(c, sign) and c.sing_exp >= variant.threshold
        if edge and c.sing_exp > variant.threshold:
            raise DivergentIntegralError(
                f"{variant.value} diverges for a numeric density with sing_exp={c.sing_exp:g}"
            )
        v, e = _numeric_side(c, sign, 0.0, eps, lambda y, s=sign: integrand(variant, u, s * y), boundary=edge)
        if math.isinf(v):
            raise DivergentIntegralError(f"{variant.value} diverges for this numeric density")
        total += v
        err += e
    return total, err


def tilted_integral(measure, eps: float, u: float, variant) -> float:
    """``int_{[-eps, eps] \\ {0}} g_variant(u, x) nu(dx)``.

    Parameters
    ----------
    measure
        A :class:`LevyTriplet`, one component or an iterable of components.
    eps
        Truncation radius.
    u
        Tilt.
    variant
        A :class:`Variant` or its string value.

    Returns
    -------
    float
        The integral; ``+-inf`` flags overflow of the tilt.
    """
    variant = Variant(variant)
    if eps <= 0.0:
        raise ValueError("eps must be > 0")
    if u == 0.0 and variant.order > 0:
        return 0.0
    parts = []
    for c in _components(measure):
        if isinstance(c, TemperedPowerLaw):
            parts.append(_power_law_tilted(c, eps, u, variant))
        elif isinstance(c, Atom):
            parts.append(_atom_tilted(c, eps, u, variant))
        else:
            parts.append(_numeric_tilted(c, eps, u, variant)[0])
    return math.fsum(parts) if all(map(math.isfinite, parts)) else sum(parts)


def tilted_integral_quad(measure, eps: float, u: float, variant) -> tuple[float, float]:
    """Quadrature evaluation of :func:`tilted_integral` with an error estimate.

    Power-law components use ``x = h t^q`` with ``q = 2 / (k0 + p - alpha)``
    so the substituted integrand is bounded at ``t = 0``.
    """
    variant = Variant(variant)
    total = err = 0.0
    for c in _components(measure):
        if isinstance(c, TemperedPowerLaw):
            if c.C == 0.0:
                continue
            p, k0 = variant.power, variant.order
            s = p - c.alpha
            if not s + k0 > 0.0:
                raise DivergentIntegralError(f"{variant.value} diverges for alpha={c.alpha:g}")
            h = min(eps, c.cutoff)
            q = 2.0 / (k0 + s)

            def weighted(x, logjac, c=c):
                # g(x) C e^{-lam x} x^(-1-alpha) * jacobian, in log form since
                # x^(-1-alpha) alone overflows for tiny x
                if x == 0.0:
                    return 0.0
                g = integrand(variant, u, c.sign * x)
                if g == 0.0 or math.isinf(g):
                    return g
                logw = math.log(c.C) - c.lam * x - (1.0 + c.alpha) * math.log(x) + logjac
                return math.copysign(math.exp(logw + math.log(abs(g))), g)

            if q <= 8.0:
                # x = h t^q makes the integrand bounded at t = 0
                def f(t, h=h, q=q):
                    if t == 0.0:
                        return 0.0
                    return weighted(h * t**q, math.log(h * q) + (q - 1.0) * math.log(t))

                v, e = integrate.quad(f, 0.0, 1.0, epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=400)
            else:
                # nearly non-integrable end: x = h e^{-w} on a half line
                def f(w, h=h):
                    x = h * math.exp(-w)
                    return weighted(x, math.log(h) - w) if x > 0.0 else 0.0

                v, e = integrate.quad(f, 0.0, math.inf, epsabs=_QUAD_ABS, epsrel=_QUAD_REL, limit=400)
        elif isinstance(c, Atom):
            v, e = _atom_tilted(c, eps, u, variant), 0.0
        else:
            v, e = _numeric_tilted(c, eps, u, variant)
        total += v
        err += e
    return total, err


# ---------------------------------------------------------------- moments


def side_moment(measure, side: int, a: float, b: float, p: float = 1.0) -> float:
    """``int_{a < |x| <= b, sign(x) = side} |x|^p nu(dx)``; ``inf`` if divergent."""
    if not b > a:
        return 0.0
    parts = []
    for c in _components(measure):
        if isinstance(c, TemperedPowerLaw):
            if c.sign != side or c.C == 0.0:
                continue
            hi = min(b, c.cutoff)
            if hi <= a:
                continue
            parts.append(c.C * power_exp_integral(p - c.alpha, c.lam, a, hi))
        elif isinstance(c, Atom):
            ax = abs(c.location)
            if (c.location > 0) == (side > 0) and a < ax <= b:
                parts.append(c.mass * ax**p)
        else:
            edge = a == 0.0 and _numeric_near_zero(c, side) and c.sing_exp >= p
            if edge and c.sing_exp > p:
                return math.inf
            parts.append(_numeric_side(c, side, a, b, lambda y: y**p, boundary=edge)[0])
    if any(math.isinf(x) for x in parts):
        return math.inf
    return math.fsum(parts)


def tail_mass(measure, eps: float) -> float:
    """``nu({|x| > eps})``."""
    if eps <= 0.0:
        raise DivergentIntegralError("tail mass at eps = 0")
    return side_moment(measure, 1, eps, math.inf, 0.0) + side_moment(measure, -1, eps, math.inf, 0.0)


def abs_moment(measure, eps: float, p: float) -> float:
    """``int_{|x| <= eps} |x|^p nu(dx)``; ``math.inf`` flags divergence."""
    return side_moment(measure, 1, 0.0, eps, p) + side_moment(measure, -1, 0.0, eps, p)


def signed_moment(measure, a: float, b: float) -> float:
    """``int_{a < |x| <= b} x nu(dx)``.

    Raises :class:`DivergentIntegralError` when both signed halves are
    infinite; a single infinite half gives ``+-inf``.
    """
    pos = side_moment(measure, 1, a, b, 1.0)
    neg = side_moment(measure, -1, a, b, 1.0)
    if math.isinf(pos) and math.isinf(neg):
        raise DivergentIntegralError("first moment is infinite on both sides")
    return pos - neg


def truncated_drift(triplet: LevyTriplet, eps: float) -> float:
    """``b_eps = b - int_{eps<|x|<=1} x nu + int_{1<|x|<=eps} x nu``.

    When the effective drift was declared this is computed as
    ``c + int_{|x|<=eps} x nu``, which keeps ``c = 0`` exact.
    """
    if triplet.declared_c is not None:
        m = signed_moment(triplet, 0.0, eps)
        if math.isfinite(m):
            return triplet.declared_c + m
    if eps < 1.0:
        return triplet.b - signed_moment(triplet, eps, 1.0)
    if eps > 1.0:
        return triplet.b + signed_moment(triplet, 1.0, eps)
    return triplet.b


def effective_drift(triplet: LevyTriplet) -> tuple[float, float]:
    """``(c, error_bar)`` with ``c = b - int_{|x|<=1} x nu``.

    The error bar is zero for declared drifts and otherwise a
    rounding-level estimate from the magnitudes involved.
    """
    if triplet.declared_c is not None:
        return triplet.declared_c, 0.0
    m = signed_moment(triplet, 0.0, 1.0)
    if not math.isfinite(m):
        return math.nan, math.inf
    scale = abs(triplet.b) + abs(side_moment(triplet, 1, 0.0, 1.0)) + abs(side_moment(triplet, -1, 0.0, 1.0))
    c = triplet.b - m
    return c, 64.0 * np.finfo(float).eps * scale


def total_mass(measure) -> float:
    """``nu(R \\ {0})``, infinite for infinite-activity measures."""
    return side_moment(measure, 1, 0.0, math.inf, 0.0) + side_moment(measure, -1, 0.0, math.inf, 0.0)


# ------------------------------------------------------ kernel bound check


class KernelBoundRatios(NamedTuple):
    """Ratios of the unit-interval integrals with weight x^-alpha to their
    comparison functions; ``None`` for rows that diverge."""

    compensated2: Optional[float]
    compensated1: Optional[float]
    plain: Optional[float]


def lemma52_bounds_check(alpha: float, gamma: float) -> KernelBoundRatios:
    """Ratios for the three two-sided comparisons with ``gamma >= 0``.

    Rows, with weight ``x^-alpha`` on ``(0, 1)``:

    * ``e^{gx} - 1 - gx`` against ``(e^g - 1 - g - g^2/2) / g``
    * ``e^{gx} - 1`` against ``(e^g - 1 - g) / g``
    * ``e^{gx}`` against ``(e^g - 1) / g``

    At ``gamma = 0`` both sides vanish and the ratio is reported as 1.
    """
    if gamma < 0.0:
        raise ValueError("gamma must be >= 0")
    if gamma > OVERFLOW:
        raise OverflowError("gamma too large")
    s = 1.0 - alpha
    out = []
    for k0 in (2, 1, 0):
        if not s + k0 > 0.0:
            out.append(None)
            continue
        if gamma == 0.0:
            out.append(1.0)
            continue
        num = unit_kernel(s, k0, gamma, 0.0)
        den = exp_remainder(gamma, k0 + 1) / gamma
        out.append(num / den)
    if all(r is None for r in out):
        raise DivergentIntegralError(f"all rows diverge for alpha={alpha:g}")
    return KernelBoundRatios(*out)


def tilted_increment(measure, eps: float, u: float, d: float) -> float:
    """``int_{[-eps, eps]} e^{ux} (e^{dx} - 1 - dx) nu(dx)`` for ``|d| eps <= 1``.

    Expanding in ``d`` keeps the result accurate when it is many orders of
    magnitude below ``Lambda_eps`` itself, as in minimality checks.
    """
    if abs(d) * eps > 1.0:
        raise ValueError("tilted_increment needs |d| eps <= 1")
    if d == 0.0:
        return 0.0
    parts = []
    for c in _components(measure):
        if isinstance(c, TemperedPowerLaw):
            if c.C == 0.0:
                continue
            h = min(eps, c.cutoff)
            gamma, dd, kappa = c.sign * u * h, c.sign * d * h, c.lam * h
            if gamma + abs(dd) > OVERFLOW:
                return math.inf
            terms = []
            coef = dd * dd / 2.0
            for k in range(2, 80):
                terms.append(coef * unit_kernel(k - c.alpha, 0, gamma, kappa))
                coef *= dd / (k + 1)
                if abs(terms[-1]) <= 1e-18 * abs(terms[0]):
                    break
            parts.append(c.C * h ** (-c.alpha) * math.fsum(terms))
        elif isinstance(c, Atom):
            if abs(c.location) <= eps:
                z = u * c.location
                if z > OVERFLOW:
                    return math.inf
                parts.append(c.mass * math.exp(z) * exp_remainder(d * c.location, 2))
        else:
            for sign in (1, -1):
                fn = lambda y, s=sign: math.exp(u * s * y) * exp_remainder(d * s * y, 2)
                parts.append(_numeric_side(c, sign, 0.0, eps, fn)[0])
    return math.fsum(parts)


def has_mass_near_zero(measure, side: int) -> bool:
    """Whether ``nu`` charges every ``(0, delta]`` (side=+1) or ``[-delta, 0)``.

    Decided from component structure only.
    """
    for c in _components(measure):
        if isinstance(c, TemperedPowerLaw) and c.sign == side and c.C > 0.0:
            return True
        if isinstance(c, NumericDensity) and _numeric_near_zero(c, side):
            return True
    return False


def components_on(measure, side: int) -> Iterable:
    """Components that put mass on the given half-line."""
    for c in _components(measure):
        if isinstance(c, TemperedPowerLaw) and c.sign == side and c.C > 0.0:
            yield c
        elif isinstance(c, Atom) and (c.location > 0) == (side > 0):
            yield c
        elif isinstance(c, NumericDensity) and _magnitude_range(c, side)[1] > 0.0:
            yield c
