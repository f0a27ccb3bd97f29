import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CONFIG_DIR
from levy_smallball.bounds import (
    F_of,
    doubling_check,
    gaussian_rate,
    martingale_bounds,
    negligibility_check,
    symmetric_rate,
    theorem15,
    tightness_check,
)
from levy_smallball.catalog import GammaDrift, StableSubordinatorDrift
from levy_smallball.esscher import NoRoot
from levy_smallball.model import NEGATIVE, Atom, LevyTriplet, TemperedPowerLaw, eval_rate, load_triplet

ATOMS = LevyTriplet((Atom(1.0, 1.0), Atom(-1.0, 1.0)), 0.0, 0.0)


def test_gaussian_report():
    rep = theorem15(LevyTriplet((), 1.0, 0.0), 0.5)
    assert (rep.N, rep.esscher_cost, rep.tilt, rep.fbar) == (0.0, 0.0, 0.0, 4.0)
    assert rep.upper_exponent == 43.0
    assert rep.lower_exponent_raw == pytest.approx(-2.0 / 3.0, rel=1e-15)
    assert rep.lower_exponent == 0.0
    assert rep.dominant == "oscillation"


def test_symmetric_atoms_report():
    rep = theorem15(ATOMS, 0.3)
    assert rep.N == 2.0 and rep.u_eps == 0.0 and rep.fbar == 0.0
    assert rep.upper_exponent == 5.0 and rep.lower_exponent == 1.0
    assert rep.dominant == "tail" and rep.tight
    assert math.exp(-5.0) <= math.exp(-2.0) <= math.exp(-1.0)


def test_stable_subordinator_with_drift_is_esscher_dominated():
    t = StableSubordinatorDrift(0.5, -1.0).triplet()
    rep = theorem15(t, 0.01)
    assert rep.dominant == "esscher"
    scale = abs(math.log(0.01)) / 0.01
    assert 0.1 < rep.esscher_cost / scale < 10.0
    assert rep.N == pytest.approx(2.0 / math.sqrt(0.01), rel=1e-14)


def test_no_root_passes_through():
    assert isinstance(theorem15(StableSubordinatorDrift(0.5).triplet(), 0.1), NoRoot)


def test_dominant_ties_go_to_esscher():
    from levy_smallball.bounds import _dominant

    assert _dominant(1.0, 1.0, 1.0) == "esscher"
    assert _dominant(2.0, 1.0, 2.0) == "oscillation"
    assert _dominant(3.0, 1.0, 2.0) == "tail"


def test_martingale_examples():
    up, low = martingale_bounds([], 1.0, 1.0)
    assert (up, low) == (13.0, pytest.approx(-11.0 / 12.0))
    up, low = martingale_bounds([Atom(0.5, 2.0), Atom(-0.5, 2.0)], 0.0, 0.5)
    assert up == pytest.approx(43.0) and low == pytest.approx(-2.0 / 3.0)
    pair = [TemperedPowerLaw(1.0, 0.5), TemperedPowerLaw(1.0, 0.5, 0.0, NEGATIVE)]
    assert F_of(pair, 0.0, 0.1) == pytest.approx(4.0 / 3.0 * 0.1**-0.5, rel=1e-14)
    assert F_of(pair, 0.0, 0.1) == pytest.approx(4.216, abs=1e-3)
    with pytest.raises(ValueError):
        martingale_bounds([], 1.0, 1.0, drift=0.5)


def test_symmetric_rate():
    comps = (TemperedPowerLaw(1.0, 1.2, 0.0, "positive", math.inf), TemperedPowerLaw(1.0, 1.2, 0.0, NEGATIVE, math.inf))
    t = LevyTriplet(comps, 0.0, 0.0)
    r = [symmetric_rate(t, e) * e**1.2 for e in (1e-2, 1e-4, 1e-6)]
    assert max(r) / min(r) == pytest.approx(1.0, abs=1e-9)  # exact power law
    assert symmetric_rate(LevyTriplet((), 1.0, 0.0), 0.1) == pytest.approx(100.0)
    with pytest.raises(ValueError):
        symmetric_rate(StableSubordinatorDrift(0.5, -1.0).triplet(), 0.1)


def test_symmetric_rate_slowly_varying_example():
    # density x^-3 |log x|^-2 near 0: N + F of order eps^-2 |log eps|^-1
    from levy_smallball.model import NumericDensity

    f = lambda x: abs(x) ** -3 * math.log(abs(x)) ** -2 if 0 < abs(x) < 0.5 else 0.0
    nd = NumericDensity(f, (-0.5, 0.5), sing_exp=2.0, near_zero_positive=True, near_zero_negative=True)
    t = LevyTriplet((nd,), 0.0, 0.0, declared_symmetric=True)
    ratios = [symmetric_rate(t, e) * e**2 * abs(math.log(e)) for e in (1e-3, 1e-5, 1e-7)]
    assert max(ratios) / min(ratios) < 1.5


def test_doubling_examples():
    assert doubling_check(LevyTriplet((), 1.0, 0.0), 0.3) == pytest.approx(4.0)
    assert doubling_check(ATOMS, 0.4) == 1.0
    pair = LevyTriplet((TemperedPowerLaw(1.0, 0.5), TemperedPowerLaw(1.0, 0.5, 0.0, NEGATIVE)))
    assert 1.0 <= doubling_check(pair, 0.01) <= 4.0
    with pytest.raises(ZeroDivisionError):
        doubling_check(LevyTriplet((), 0.0, 1.0), 0.1)


def test_gaussian_rate():
    assert eval_rate(gaussian_rate(1.0), 0.1) == pytest.approx(math.pi**2 / 8 * 100)
    assert gaussian_rate(4.0).constant == pytest.approx(math.pi**2 / 2)
    with pytest.raises(ValueError):
        gaussian_rate(0.0)


def test_gaussian_plus_jumps_is_oscillation_dominated():
    t = load_triplet(CONFIG_DIR / "gaussian_with_jumps.json")
    vals = [theorem15(t, e).upper_exponent * e**2 for e in (1e-2, 1e-3, 1e-4)]
    assert max(vals) < 20.0 and theorem15(t, 1e-4).dominant == "oscillation"


def test_tightness():
    assert tightness_check(theorem15(ATOMS, 0.3)).tight
    t = StableSubordinatorDrift(0.5, -1.0).triplet()
    ratios = [tightness_check(theorem15(t, e)).ratio for e in (1e-2, 1e-3, 1e-4)]
    assert ratios[0] > ratios[1] > ratios[2]
    g = GammaDrift(1.0, 1.0, -1.0).triplet()
    r = [theorem15(g, e).tightness_ratio / e for e in (1e-3, 1e-4, 1e-5)]
    assert max(r) / min(r) < 3.0


def test_negligibility_cases():
    a = negligibility_check(StableSubordinatorDrift(0.5, -1.0).triplet(), 1e-3)
    assert a.case_a and a.slack_a >= 0.0
    b = negligibility_check(load_triplet(CONFIG_DIR / "polynomial_half_cneg.json"), 1e-3)
    assert b.case_b and b.slack_b >= 0.0
    # case (b) only applies once int |x| nu <= |c| / 2, i.e. 4 sqrt(eps) <= 1/2
    assert not negligibility_check(load_triplet(CONFIG_DIR / "polynomial_half_cneg.json"), 0.1).case_b
    sym = negligibility_check(ATOMS, 0.3)
    assert sym.slack_a == 0.0
    assert negligibility_check(StableSubordinatorDrift(0.5).triplet(), 0.1).note.startswith("no root")


@given(st.floats(-0.9, 1.9), st.floats(0.1, 5.0), st.floats(-3.0, 3.0), st.floats(1e-4, 0.3))
@settings(max_examples=60, deadline=None)
def test_report_terms_nonnegative(alpha, C, b, eps):
    t = LevyTriplet((TemperedPowerLaw(C, alpha), TemperedPowerLaw(1.0, 0.5, 0.0, NEGATIVE)), 0.0, b)
    rep = theorem15(t, eps)
    assert rep.N >= 0 and rep.esscher_cost >= 0 and rep.fbar >= 0 and rep.tilt >= 0
    assert rep.upper_exponent >= rep.lower_exponent
    assert rep.lower_exponent == max(rep.lower_exponent_raw, 0.0)
