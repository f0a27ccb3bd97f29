"""Incomplete gamma functions and truncated power-exponential moments.

Everything in the measure calculus reduces to integrals of the form

    J(s, beta; a, b) = int_a^b y**(s - 1) * exp(-beta * y) dy,

which are differences of (possibly negative-order) incomplete gamma
functions.  The upper function is evaluated with the Lentz continued
fraction for large arguments and with a power series plus downward
recurrence in the order for small arguments, which keeps every branch
free of catastrophic cancellation for real orders of either sign.
"""

from __future__ import annotations

import math

EULER_GAMMA = 0.5772156649015329

_TINY = 1e-300
_EPS = 1e-16
_MAX_ITER = 10_000

# zeta(k) for k = 2..9, used by the Taylor series of log Gamma(1 + s)
_ZETA = (
    1.6449340668482264,
    1.2020569031595942,
    1.0823232337111382,
    1.0369277551433699,
    1.0173430619844491,
    1.0083492773819228,
    1.0040773561979443,
    1.0020083928260822,
)


def _lgamma1p(s: float) -> float:
    """log Gamma(1 + s), accurate in the relative sense for tiny s."""
    if abs(s) > 0.01:
        return math.lgamma(1.0 + s)
    total = -EULER_GAMMA * s
    power = -s
    for k, z in enumerate(_ZETA, start=2):
        power *= -s
        total += z * power / k
    return total


def _lower_sum(s: float, x: float) -> float:
    """sum_j x^j / (s (s+1) ... (s+j)), s > 0."""
    term = 1.0 / s
    total = term
    denom = s
    for _ in range(_MAX_ITER):
        denom += 1.0
        term *= x / denom
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    return total


def _lower_series(s: float, x: float) -> float:
    """gamma(s, x) = x^s e^-x * _lower_sum(s, x)."""
    return _lower_sum(s, x) * math.exp(-x + s * math.log(x))


def _upper_cf(s: float, x: float) -> float:
    """Gamma(s, x) by the modified Lentz continued fraction (x > 0)."""
    b = x + 1.0 - s
    c = 1.0 / _TINY
    d = 1.0 / b if b != 0.0 else 1.0 / _TINY
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - s)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + s * math.log(x)) * h


def _upper_small_order(s: float, x: float) -> float:
    """Gamma(s, x) for |s| <= 1/2 and 0 < x < 1.5.

    Splits off the k = 0 term of the lower series and combines it with
    Gamma(s) analytically, so the s -> 0 limit (the exponential integral)
    is reached without a 1/s blow-up.
    """
    lx = math.log(x)
    if s == 0.0:
        head = -EULER_GAMMA - lx
    else:
        head = (math.expm1(_lgamma1p(s)) - math.expm1(s * lx)) / s
    tail = 0.0
    term = 1.0
    for k in range(1, _MAX_ITER):
        term *= -x / k
        inc = term / (s + k)
        tail += inc
        if abs(inc) < _EPS * max(abs(tail), _TINY):
            break
    return head - math.exp(s * lx) * tail


def upper_gamma(s: float, x: float) -> float:
    """Upper incomplete gamma Gamma(s, x) for real s and x >= 0.

    Negative and zero orders are supported (Gamma(0, x) is E1(x)).
    Returns ``math.inf`` for x == 0 and s <= 0.
    """
    if x < 0.0:
        raise ValueError("upper_gamma needs x >= 0")
    if math.isinf(x):
        return 0.0
    if x == 0.0:
        return math.gamma(s) if s > 0.0 else math.inf
    if 0.0 < s <= 0.5 and x < 1.5:
        # Gamma(s) - gamma(s, x) cancels badly for small s
        return _upper_small_order(s, x)
    if s > 0.0 and x < s + 1.0:
        return math.gamma(s) - _lower_series(s, x)
    if x >= 1.5 or s > 0.0:
        return _upper_cf(s, x)
    # s <= 0 and x < 1.5: start from an order in [-1/2, 1/2] and recur down
    n = int(round(-s))
    s0 = s + n
    value = _upper_small_order(s0, x)
    a = s0
    for _ in range(n):
        a -= 1.0
        value = (value - math.exp(a * math.log(x) - x)) / a
    return value


def lower_gamma(s: float, x: float) -> float:
    """Lower incomplete gamma gamma(s, x) = int_0^x t^(s-1) e^-t dt, s > 0."""
    if s <= 0.0:
        raise ValueError("lower_gamma needs s > 0")
    if x <= 0.0:
        return 0.0
    if x < s + 1.0:
        return _lower_series(s, x)
    if s < 1e-300:
        return math.inf  # about 1 / s, beyond the float range
    return math.gamma(s) - _upper_cf(s, x)


def regularized_lower_gamma(s: float, x: float) -> float:
    """P(s, x) = gamma(s, x) / Gamma(s)."""
    if s <= 0.0:
        raise ValueError("regularized_lower_gamma needs s > 0")
    if x <= 0.0:
        return 0.0
    if x < s + 1.0:
        return _lower_sum(s, x) * math.exp(-x + s * math.log(x) - math.lgamma(s))
    return 1.0 - _upper_cf(s, x) * math.exp(-math.lgamma(s))


def _powdiff(p: float, a: float, b: float) -> float:
    """(b^p - a^p) / p with the p -> 0 limit log(b / a); b may be inf."""
    if p == 0.0:
        return math.log(b / a) if a > 0.0 else math.inf
    if a > 0.0 and not math.isinf(b):
        # expm1 keeps the small-p limit log(b / a) without cancellation
        return (math.expm1(p * math.log(b)) - math.expm1(p * math.log(a))) / p
    hi = 0.0 if (math.isinf(b) and p < 0.0) else (math.inf if math.isinf(b) else b**p)
    if a == 0.0:
        lo = 0.0 if p > 0.0 else math.inf
    else:
        lo = a**p
    return (hi - lo) / p


def power_exp_integral(s: float, beta: float, a: float, b: float) -> float:
    """int_a^b y^(s-1) exp(-beta y) dy for 0 <= a < b <= inf.

    ``beta`` may be negative only on a finite range.  With a == 0 the order
    s must be positive.  Overflow yields ``math.inf``.
    """
    if not b > a:
        return 0.0
    if a == 0.0 and s <= 0.0:
        return math.inf
    if beta == 0.0:
        return _powdiff(s, a, b)
    if beta < 0.0:
        if math.isinf(b):
            return math.inf
        # positive-term series
        g = -beta
        total = 0.0
        coef = 1.0
        for j in range(_MAX_ITER):
            inc = coef * _powdiff(s + j, a, b)
            total += inc
            if math.isinf(total):
                return math.inf
            if j > g and inc < _EPS * total:
                break
            coef *= g / (j + 1)
        return total
    if not math.isinf(b) and beta * b <= 1.0:
        total = 0.0
        coef = 1.0
        for j in range(_MAX_ITER):
            inc = coef * _powdiff(s + j, a, b)
            total += inc
            if abs(inc) <= _EPS * abs(total):
                break
            coef *= -beta / (j + 1)
        return total
    scale = beta ** (-s)
    if a == 0.0:
        return scale * lower_gamma(s, beta * b) if not math.isinf(b) else scale * math.gamma(s)
    if s > 0.0 and not math.isinf(b) and beta * b <= s + 1.0:
        return scale * (lower_gamma(s, beta * b) - lower_gamma(s, beta * a))
    return scale * (upper_gamma(s, beta * a) - upper_gamma(s, beta * b))


def unit_moment(s: float, beta: float) -> float:
    """int_0^1 y^(s-1) exp(-beta y) dy, s > 0."""
    return power_exp_integral(s, beta, 0.0, 1.0)


def shifted_moments(s: float, kappa: float, k0: int, k1: int) -> list[float]:
    """[unit_moment(s + k, kappa) for k in k0..k1-1] via downward recurrence.

    The recurrence M(t) = (kappa M(t + 1) + e^-kappa) / t is stable in the
    downward direction for every kappa >= 0.
    """
    if kappa == 0.0:
        return [1.0 / (s + k) for k in range(k0, k1)]
    out = [0.0] * (k1 - k0)
    m = unit_moment(s + k1 - 1, kappa)
    out[-1] = m
    ek = math.exp(-kappa)
    for i in range(k1 - k0 - 2, -1, -1):
        t = s + k0 + i
        m = (kappa * m + ek) / t
        out[i] = m
    return out
