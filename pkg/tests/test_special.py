import math

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sps

from levy_smallball.special import (
    lower_gamma,
    power_exp_integral,
    regularized_lower_gamma,
    shifted_moments,
    unit_moment,
    upper_gamma,
)

mp.mp.dps = 40


def oracle_upper(s, x):
    return float(mp.gammainc(s, x, mp.inf))


def oracle_J(s, beta, a, b):
    f = lambda y: y ** (s - 1) * mp.exp(-beta * y)
    pts = [a, b] if a > 0 else [0, min(b, 1e-3), b] if b > 1e-3 else [0, b]
    return float(mp.quad(f, pts))


@pytest.mark.parametrize(
    "s,x",
    [(0.5, 0.1), (0.5, 3.0), (2.5, 10.0), (0.0, 0.3), (0.0, 5.0), (-0.5, 0.2), (-1.5, 0.05),
     (-2.0, 1.0), (-0.9999, 0.7), (1e-9, 0.4), (-3.3, 40.0), (7.0, 2.0)],
)
def test_upper_gamma_matches_mpmath(s, x):
    assert upper_gamma(s, x) == pytest.approx(oracle_upper(s, x), rel=1e-12)


def test_upper_gamma_edges():
    assert upper_gamma(0.0, 0.0) == math.inf
    assert upper_gamma(2.0, 0.0) == pytest.approx(1.0)
    assert upper_gamma(1.0, math.inf) == 0.0
    with pytest.raises(ValueError):
        upper_gamma(1.0, -1.0)


@given(st.floats(0.05, 30.0), st.floats(1e-6, 60.0))
@settings(max_examples=150, deadline=None)
def test_regularized_lower_gamma_vs_scipy(s, x):
    assert regularized_lower_gamma(s, x) == pytest.approx(sps.gammainc(s, x), rel=1e-11, abs=1e-300)


@given(st.floats(0.05, 10.0), st.floats(1e-4, 30.0))
@settings(max_examples=100, deadline=None)
def test_lower_plus_upper_is_gamma(s, x):
    assert lower_gamma(s, x) + upper_gamma(s, x) == pytest.approx(math.gamma(s), rel=1e-11)


@pytest.mark.parametrize(
    "s,beta,a,b",
    [(0.5, 0.0, 0.0, 1.0), (0.5, -1.0, 0.0, 1.0), (-0.5, 2.0, 0.01, 1.0), (-0.5, -30.0, 0.01, 1.0),
     (1.5, 40.0, 0.0, 1.0), (0.0, 1.0, 1.0, math.inf), (-1.0, 0.5, 2.0, math.inf), (2.0, 1e-3, 0.5, 3.0),
     (0.3, 5.0, 0.2, 0.25), (-1.8, 100.0, 0.001, 0.5)],
)
def test_power_exp_integral_matches_quadrature(s, beta, a, b):
    assert power_exp_integral(s, beta, a, b) == pytest.approx(oracle_J(s, beta, a, b), rel=1e-11)


def test_power_exp_integral_divergent_and_empty():
    assert power_exp_integral(-0.5, 1.0, 0.0, 1.0) == math.inf
    assert power_exp_integral(0.5, -1.0, 0.0, math.inf) == math.inf
    assert power_exp_integral(0.5, 1.0, 1.0, 1.0) == 0.0


def test_unit_moment_series_example():
    # int_0^1 e^x x^-1/2 dx = sum 1 / (n! (n + 1/2))
    series = math.fsum(1.0 / (math.factorial(n) * (n + 0.5)) for n in range(30))
    assert unit_moment(0.5, -1.0) == pytest.approx(series, rel=1e-14)
    assert series == pytest.approx(2.9253, abs=1e-4)


@given(st.floats(0.01, 5.0), st.floats(0.0, 200.0))
@settings(max_examples=100, deadline=None)
def test_shifted_moments_agree_with_direct(s, kappa):
    ms = shifted_moments(s, kappa, 0, 6)
    for k, m in enumerate(ms):
        assert m == pytest.approx(unit_moment(s + k, kappa), rel=1e-10)


@pytest.mark.parametrize("s", [1e-300, 1e-20, -1e-12, 1e-6])
def test_power_integral_small_order_limit(s):
    # int_a^b y^(s-1) dy tends to log(b / a) without cancellation
    ref = float((mp.expm1(s * mp.log(2)) - mp.expm1(s * mp.log(0.5))) / s)
    assert power_exp_integral(s, 0.0, 0.5, 2.0) == pytest.approx(ref, rel=1e-14)
    assert upper_gamma(1e-300, 0.4) == pytest.approx(oracle_upper(0, 0.4), rel=1e-12)
