"""Analytic soliton profiles, velocities, and travelling-wave residuals."""

import numpy as np
import pytest

import stwpa as st
from stwpa.errors import GridTooCoarse
from stwpa.solitons import _residual_operator

LINE = st.LineParams(r=0.1, c3=0.32)
LINE_P = st.LineParams(r=0.1, c3=0.0, c4=0.5)
LINE_M = st.LineParams(r=0.1, c3=0.0, c4=-0.5)


def test_construction_guards():
    with pytest.raises(ValueError, match="c3"):
        st.SolitonSpec("kdv", -0.02, LINE)
    with pytest.raises(ValueError, match="c4 > 0"):
        st.SolitonSpec("mkdv_plus", 0.1, LINE_M)
    with pytest.raises(ValueError, match="c4 < 0"):
        st.SolitonSpec("mkdv_minus", 0.1, LINE_P)
    with pytest.raises(ValueError, match="nonzero"):
        st.SolitonSpec("kdv", 0.0, LINE)
    with pytest.raises(ValueError, match="direction"):
        st.SolitonSpec("kdv", 0.02, LINE, direction=2)
    with pytest.raises(ValueError, match="kind"):
        st.SolitonSpec("bogus", 0.02, LINE)
    with pytest.raises(ValueError, match="r must be > 0"):
        st.LineParams(r=0.0, c3=0.32)


def test_peak_and_width_points():
    spec = st.SolitonSpec("kdv", 0.02, LINE, x0=100.0)
    phi, _ = st.profile(spec, np.array([100.0]))
    assert phi[0] == 0.02  # sech^2(0) = 1, sampling identity
    k = st.width_parameter(spec)
    assert 1.0 / k == pytest.approx(13.693, abs=1e-3)
    assert st.half_width(spec) == pytest.approx(27.386, abs=1e-3)
    # half-maximum sits at arccosh(sqrt(2))/k from the center
    x_half = 100.0 + np.arccosh(np.sqrt(2.0)) / k
    assert st.profile(spec, np.array([x_half]))[0][0] == pytest.approx(0.01, rel=1e-12)
    # at one width parameter (13.69 cells) the profile is sech^2(1) ~ 0.42 A
    phi_w = st.profile(spec, np.array([100.0 + 1.0 / k]))[0][0]
    assert phi_w == pytest.approx(0.02 / np.cosh(1.0) ** 2, rel=1e-12)
    assert phi_w == pytest.approx(0.0084, abs=2e-4)


def test_kink_asymptotes():
    spec = st.SolitonSpec("mkdv_minus", 0.1, LINE_M)
    phi, _ = st.profile(spec, np.array([-1e6, 1e6]))
    assert phi[0] == pytest.approx(-0.1, rel=1e-12)
    assert phi[1] == pytest.approx(0.1, rel=1e-12)


def test_velocities():
    assert st.soliton_velocity(st.SolitonSpec("kdv", 0.02, LINE)) == pytest.approx(
        1.0 + 0.32 * 0.02 / 6.0, rel=1e-15)
    assert st.soliton_velocity(st.SolitonSpec("mkdv_plus", 0.1, LINE_P)) == pytest.approx(
        1.0 + 0.5 * 0.01 / 24.0, rel=1e-15)
    assert st.soliton_velocity(st.SolitonSpec("mkdv_minus", 0.1, LINE_M)) == pytest.approx(
        1.0 - 0.5 * 0.01 / 12.0, rel=1e-15)
    # linear-wave limit
    for kind, line in (("kdv", LINE), ("mkdv_plus", LINE_P), ("mkdv_minus", LINE_M)):
        tiny = st.SolitonSpec(kind, 1e-9, line)
        assert st.soliton_velocity(tiny) == pytest.approx(1.0, abs=1e-9)


def test_width_uses_absolute_amplitude():
    down = st.SolitonSpec("mkdv_minus", -0.1, LINE_M)
    up = st.SolitonSpec("mkdv_minus", 0.1, LINE_M)
    assert st.width_parameter(down) == st.width_parameter(up)
    assert st.half_width(down) > 0.0


def test_translation_covariance_exact():
    x = np.arange(0.0, 300.0)
    delta = 0.5  # exactly representable shift
    a = st.SolitonSpec("kdv", 0.02, LINE, x0=100.0)
    b = st.SolitonSpec("kdv", 0.02, LINE, x0=100.0 + delta)
    pa, da = st.profile(a, x, 0.0)
    pb, db = st.profile(b, x + delta, 0.0)
    assert np.array_equal(pa, pb)
    assert np.array_equal(da, db)


def test_galilean_consistency():
    spec = st.SolitonSpec("kdv", 0.02, LINE, x0=100.0)
    x = np.linspace(50.0, 150.0, 101)
    v_s = st.soliton_velocity(spec)
    for delta in (3.0, 17.5):
        p1, d1 = st.profile(spec, x, 40.0)
        p2, d2 = st.profile(spec, x - v_s * delta, 40.0 - delta)
        assert np.allclose(p1, p2, rtol=1e-12, atol=1e-15)
        assert np.allclose(d1, d2, rtol=1e-12, atol=1e-15)


def test_left_mover_flips_time_derivative():
    right = st.SolitonSpec("kdv", 0.02, LINE, x0=100.0, direction=1)
    left = st.SolitonSpec("kdv", 0.02, LINE, x0=100.0, direction=-1)
    x = np.linspace(60.0, 140.0, 81)
    pr, dr = st.profile(right, x, 0.0)
    pl, dl = st.profile(left, x, 0.0)
    assert np.array_equal(pr, pl)
    assert np.array_equal(dr, -dl)


def test_profile_gradient_matches_finite_difference():
    spec = st.SolitonSpec("mkdv_plus", 0.1, LINE_P, x0=10.0)
    x = np.linspace(-40.0, 60.0, 301)
    h = 1e-6
    fd = (st.profile(spec, x + h)[0] - st.profile(spec, x - h)[0]) / (2.0 * h)
    assert np.allclose(st.profile_gradient(spec, x), fd, rtol=1e-7, atol=1e-12)


@pytest.mark.parametrize("kind,line,amp", [
    ("kdv", LINE, 0.02),
    ("mkdv_plus", LINE_P, 0.1),
    ("mkdv_minus", LINE_M, 0.1),
])
def test_residual_fourth_order_convergence(kind, line, amp):
    spec = st.SolitonSpec(kind, amp, line)
    span = 12.0 * st.half_width(spec)
    res = [st.evolution_residual(spec, np.arange(-span, span, h))
           for h in (0.8, 0.4, 0.2)]
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all(orders >= 3.9)


def test_residual_zero_for_trivial_solution():
    out = _residual_operator(np.zeros(64), 0.1, 1.0, "kdv", LINE)
    assert np.all(out == 0.0)


@pytest.mark.parametrize("kind,line,amp,wrong_factor", [
    ("mkdv_plus", LINE_P, 0.1, 1.0 / 12.0),   # true: A^2/24
    ("mkdv_minus", LINE_M, 0.1, 1.0 / 24.0),  # true: A^2/12
])
def test_residual_discriminates_velocity(kind, line, amp, wrong_factor):
    spec = st.SolitonSpec(kind, amp, line)
    span = 12.0 * st.half_width(spec)
    eta = np.arange(-span, span, 0.2)
    good = st.evolution_residual(spec, eta)
    wrong = st.evolution_residual(
        spec, eta, v_s=line.v0 * (1.0 + line.c4 * amp * amp * wrong_factor))
    assert good < 1e-9
    assert wrong > 100.0 * good
    assert wrong > 1e-7


def test_residual_grid_validation():
    spec = st.SolitonSpec("kdv", 0.02, LINE)
    with pytest.raises(GridTooCoarse):
        st.evolution_residual(spec, np.arange(-300.0, 300.0, 5.0))
    with pytest.raises(ValueError, match="uniform"):
        st.evolution_residual(spec, np.cumsum(np.linspace(0.1, 0.3, 600)))
    with pytest.raises(GridTooCoarse):
        st.evolution_residual(spec, np.arange(4.0))


def test_polarity_follows_nonlinearity_sign():
    neg_line = st.LineParams(r=0.1, c3=-0.32)
    spec = st.SolitonSpec("kdv", -0.02, neg_line)
    phi, _ = st.profile(spec, np.array([0.0]))
    assert phi[0] == -0.02
