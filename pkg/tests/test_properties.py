"""Cross-module invariants on randomly generated triplets."""

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from levy_smallball.bounds import doubling_check, theorem15
from levy_smallball.calculus import abs_moment, tail_mass
from levy_smallball.classify import classify
from levy_smallball.esscher import EsscherSolution, NoRoot, lambda_eps, solve_esscher
from levy_smallball.model import NEGATIVE, POSITIVE, Atom, LevyTriplet, TemperedPowerLaw

power_laws = st.builds(
    TemperedPowerLaw,
    C=st.floats(0.05, 5.0),
    alpha=st.floats(-0.9, 1.9),
    lam=st.sampled_from([0.0, 0.5, 3.0]),
    side=st.sampled_from([POSITIVE, NEGATIVE]),
    cutoff=st.sampled_from([0.5, 1.0, 4.0]),
)
atoms = st.builds(Atom, location=st.sampled_from([-1.5, -0.3, 0.2, 0.7, 2.0]), mass=st.floats(0.05, 3.0))
triplets = st.builds(
    lambda comps, s2, b: LevyTriplet(tuple(comps), s2, b),
    st.lists(st.one_of(power_laws, atoms), min_size=1, max_size=4),
    st.sampled_from([0.0, 0.0, 0.3]),
    st.floats(-4.0, 4.0),
)
radii = st.floats(1e-4, 0.4)


@given(triplets, radii)
@settings(max_examples=80, deadline=None)
def test_doubling_ratio_in_range(t, eps):
    assume(t.sigma2 > 0.0 or tail_mass(t, 2 * eps) + abs_moment(t, 2 * eps, 2.0) > 0.0)
    assert 1.0 - 1e-9 <= doubling_check(t, eps) <= 4.0 + 1e-9


@given(triplets, radii)
@settings(max_examples=80, deadline=None)
def test_root_exists_iff_sdp_and_not_subordinator(t, eps):
    cls = classify(t)
    r = solve_esscher(t, eps)
    if isinstance(r, EsscherSolution):
        # the infimum of Lambda_eps is attained and <= Lambda_eps(0) = 0
        assert r.lambda_at_root <= 1e-12 * max(1.0, abs(r.lambda_at_root))
        for d in (0.5, 2.0):
            assert lambda_eps(t, eps, r.u_eps + d / eps) >= r.lambda_at_root - 1e-9 * abs(r.lambda_at_root) - 1e-12
    else:
        assert r.reason in ("subordinator", "neg_subordinator", "no_sdp")
        if r.reason == "subordinator":
            assert cls.is_subordinator
        if r.reason == "neg_subordinator":
            assert cls.is_neg_subordinator


@given(triplets, radii)
@settings(max_examples=60, deadline=None)
def test_reflection_invariance_of_bounds(t, eps):
    a = theorem15(t, eps)
    b = theorem15(t.reflect(), eps)
    assert isinstance(a, NoRoot) == isinstance(b, NoRoot)
    if isinstance(a, NoRoot):
        return
    assert b.u_eps == pytest.approx(-a.u_eps, rel=1e-6, abs=1e-6 / eps)
    for f in ("N", "esscher_cost", "fbar", "upper_exponent"):
        assert getattr(b, f) == pytest.approx(getattr(a, f), rel=1e-6, abs=1e-9)


@given(triplets, st.floats(1e-4, 0.2), st.floats(1.05, 3.0))
@settings(max_examples=60, deadline=None)
def test_tail_mass_monotone(t, eps, k):
    assert tail_mass(t, eps) >= tail_mass(t, k * eps)
    assert abs_moment(t, eps, 2.0) <= abs_moment(t, k * eps, 2.0)
