import math

import pytest
from hypothesis import given, settings, strategies as st

from pcosync.exceptions import AssumptionViolationError, InvalidArgumentError
from pcosync.phase import TWO_PI
from pcosync.prc import (OscillatorProfile, PhaseResponseCurve, check_assumption1, eval_prc,
                         eval_ptc, eval_ptc_iter, is_delay_advance)

PI = math.pi

SAW = PhaseResponseCurve("sawtooth")
TRI = PhaseResponseCurve("triangle")
SINE = PhaseResponseCurve("negative_sine")

certified_profiles = st.builds(
    OscillatorProfile,
    st.sampled_from([SAW, TRI, SINE]),
    st.floats(0.05, 0.95),
)
open_lower = st.floats(1e-6, PI - 1e-6)
open_upper = st.floats(PI + 1e-6, TWO_PI - 1e-6)


def test_sawtooth_branches():
    assert eval_prc(SAW, PI / 2) == -PI / 2
    assert eval_prc(SAW, 1.5 * PI) == pytest.approx(PI / 2)
    assert eval_prc(SAW, PI) == 0.0


def test_triangle_at_pi():
    assert eval_prc(TRI, PI) == 0.0
    assert eval_prc(TRI, PI / 4) == -PI / 4
    assert eval_prc(TRI, 1.75 * PI) == pytest.approx(PI / 4)


def test_negative_sine():
    assert eval_prc(SINE, 1.5 * PI) == 1.0


@pytest.mark.parametrize("prc", [SAW, TRI, SINE, PhaseResponseCurve.zero()])
def test_curves_vanish_at_ends(prc):
    assert eval_prc(prc, 0.0) == 0.0
    assert eval_prc(prc, TWO_PI) == 0.0


def test_value_at_pi_override():
    prc = PhaseResponseCurve("sawtooth", value_at_pi=-1.0)
    assert eval_prc(prc, PI) == -1.0


def test_out_of_range_phase_rejected():
    with pytest.raises(InvalidArgumentError):
        eval_prc(SINE, -0.1)
    with pytest.raises(InvalidArgumentError):
        eval_prc(SINE, 7.0)


def test_tabulated_interpolation():
    prc = PhaseResponseCurve("tabulated", ((0, 0), (PI, -1.0), (TWO_PI, 0)))
    assert eval_prc(prc, PI / 2) == pytest.approx(-0.5)
    assert eval_prc(prc, 1.5 * PI) == pytest.approx(-0.5)


@pytest.mark.parametrize("bp", [
    ((0, 0), (1.0, 1.0)),                    # does not reach 2pi
    ((0, 0), (2.0, 1.0), (2.0, 0.0), (TWO_PI, 0)),  # repeated angle
    ((0, 1.0), (TWO_PI, 0)),                 # nonzero at 0
    ((0, 0),),
])
def test_tabulated_validation(bp):
    with pytest.raises(InvalidArgumentError):
        PhaseResponseCurve("tabulated", bp)


def test_unknown_kind_and_bad_gain():
    with pytest.raises(InvalidArgumentError):
        PhaseResponseCurve("cosine")
    with pytest.raises(InvalidArgumentError):
        OscillatorProfile(SINE, 0.0)


def test_ptc_examples():
    assert eval_ptc(OscillatorProfile(SAW, 0.4), PI / 2) == pytest.approx(0.3 * PI)
    assert eval_ptc(OscillatorProfile(SAW, 0.5), 1.5 * PI) == pytest.approx(1.75 * PI)


@pytest.mark.parametrize("prc", [SAW, TRI, SINE])
def test_ptc_fixed_points(prc):
    p = OscillatorProfile(prc, 0.7)
    assert eval_ptc(p, 0.0) == 0.0
    assert eval_ptc(p, TWO_PI) == TWO_PI


def test_ptc_leaving_range_raises():
    with pytest.raises(AssumptionViolationError):
        eval_ptc(OscillatorProfile(SAW, 1.5), PI / 2)


def test_ptc_iter():
    p = OscillatorProfile(SAW, 0.4)
    assert eval_ptc_iter(p, 1.234, 0) == 1.234
    assert eval_ptc_iter(p, PI / 2, 2) == pytest.approx(0.18 * PI)
    assert eval_ptc_iter(p, TWO_PI, 3) == TWO_PI
    with pytest.raises(InvalidArgumentError):
        eval_ptc_iter(p, 1.0, -1)


def test_certification_examples():
    assert check_assumption1(OscillatorProfile(SAW, 0.4), 2001).passed
    rep = check_assumption1(OscillatorProfile(SAW, 1.5), 2001)
    assert not rep.passed
    v = rep.first_violation
    assert v.value == pytest.approx(-0.5 * v.theta)
    assert v.margin < 0
    assert check_assumption1(OscillatorProfile(SINE, 0.4), 2001).passed
    assert check_assumption1(OscillatorProfile(TRI, 0.6)).passed


def test_certification_lists_every_violation():
    rep = check_assumption1(OscillatorProfile(SAW, 1.5), 100)
    # 1.5 gain overshoots on both halves of the circle
    assert len(rep.violations) == rep.samples


def test_sine_beyond_unit_gain_fails():
    # ptc(theta) ~ (1 - gain) * theta < 0 near zero once the gain exceeds 1
    rep = check_assumption1(OscillatorProfile(SINE, 1.2), 2001)
    assert not rep.passed
    v = rep.first_violation
    assert v.theta < PI / 2 and v.value < 0


def test_delay_advance():
    assert is_delay_advance(SINE, 1001)
    assert is_delay_advance(TRI, 1001)
    assert is_delay_advance(SAW, 1001)
    assert not is_delay_advance(PhaseResponseCurve.zero(), 1001)


def test_grid_size_validated():
    with pytest.raises(InvalidArgumentError):
        check_assumption1(OscillatorProfile(SINE, 0.4), 1)


@settings(max_examples=300, deadline=None)
@given(certified_profiles, open_lower, open_upper)
def test_certified_profiles_never_overshoot(profile, lo, hi):
    assert 0.0 < eval_ptc(profile, lo) < lo
    assert hi < eval_ptc(profile, hi) < TWO_PI


@settings(max_examples=200, deadline=None)
@given(certified_profiles, st.one_of(open_lower, open_upper), st.integers(0, 6))
def test_iterates_approach_firing_reference(profile, theta, k):
    fix = 0.0 if theta < PI else TWO_PI
    a = eval_ptc_iter(profile, theta, k)
    b = eval_ptc_iter(profile, theta, k + 1)
    assert abs(b - fix) <= abs(a - fix)


@settings(max_examples=200, deadline=None)
@given(certified_profiles, st.one_of(open_lower, open_upper), st.integers(0, 4), st.integers(0, 4))
def test_iteration_composes(profile, theta, j, k):
    direct = eval_ptc_iter(profile, theta, j + k)
    staged = eval_ptc_iter(profile, eval_ptc_iter(profile, theta, j), k)
    assert staged == direct


def test_weak_certification_admits_zero_coupling():
    p = OscillatorProfile(PhaseResponseCurve.zero(), 0.5)
    assert not check_assumption1(p, 501).passed
    assert check_assumption1(p, 501, strict=False).passed
