"""Probe velocity profiles, horizon pairs, effective metric, probe runs."""

import warnings

import numpy as np
import pytest

import stwpa as st
from stwpa.errors import ImaginaryVelocity, NoHorizon, ProbeAmplitudeWarning
from stwpa.horizon import VelocityProfile, run_probe

from helpers import REF_A, REF_C3, REF_R

LINE = st.LineParams(r=REF_R, c3=REF_C3)


def closed_form_kdv_horizon(A, c3, r):
    """Independent inversion of v(eta) = v_s on the sech^2 background."""
    v_s = 1.0 + c3 * A / 6.0
    level = (v_s**2 - 1.0) / (c3 * A)
    k = np.sqrt(c3 * A / (12.0 * r))
    return np.arccosh(1.0 / np.sqrt(level)) / k


def test_probe_velocity_asymptotics_and_peak():
    spec = st.SolitonSpec("kdv", REF_A, LINE)
    assert st.probe_velocity(spec, 1e9) == pytest.approx(1.0, abs=1e-14)
    v0_peak = st.probe_velocity(spec, 0.0)
    assert v0_peak == pytest.approx(np.sqrt(1.0 + REF_C3 * REF_A), rel=1e-14)
    v_s = st.soliton_velocity(spec)
    assert v0_peak > v_s > st.probe_velocity(spec, 1e9)


def test_probe_velocity_kink_background():
    line = st.LineParams(r=0.1, c3=0.0, c4=-0.5)
    spec = st.SolitonSpec("mkdv_minus", 0.1, line)
    v_s = st.soliton_velocity(spec)
    assert st.probe_velocity(spec, 0.0) == pytest.approx(1.0, abs=1e-14)
    v_far = st.probe_velocity(spec, 1e8)
    assert v_far == pytest.approx(np.sqrt(1.0 - 0.25 * 0.01), rel=1e-12)
    assert v_far < v_s < 1.0


def test_find_horizons_matches_closed_form():
    spec = st.SolitonSpec("kdv", REF_A, LINE)
    report = st.find_horizons(spec)
    eta_exact = closed_form_kdv_horizon(REF_A, REF_C3, REF_R)
    assert len(report.horizons) == 2
    assert report.eta_white == pytest.approx(eta_exact, abs=1e-10)
    assert report.eta_black == pytest.approx(-eta_exact, abs=1e-10)
    assert report.eta_white == pytest.approx(15.69, abs=0.01)
    prof = st.velocity_profile(spec)
    for h in report.horizons:
        assert abs(float(prof.velocity(h.eta)) - report.v_s) <= 1e-12
        assert h.kappa > 0.0
        assert h.hawking_temperature > 0.0
    assert report.region_of(-100.0) == "I"
    assert report.region_of(0.0) == "II"
    assert report.region_of(100.0) == "III"
    assert "convention" in report.note


def test_horizon_labels_follow_propagation_sense():
    spec = st.SolitonSpec("kdv", REF_A, LINE)
    rep = st.find_horizons(spec)
    kinds = {h.kind: h.eta for h in rep.horizons}
    assert kinds["black"] < 0.0 < kinds["white"]  # trailing edge is black
    mirrored = st.SolitonSpec("kdv", REF_A, LINE, direction=-1)
    rep_m = st.find_horizons(mirrored)
    kinds_m = {h.kind: h.eta for h in rep_m.horizons}
    assert kinds_m["black"] > 0.0 > kinds_m["white"]


def test_horizon_pair_persists_at_small_amplitude():
    for A in (1e-3, 1e-2, 1e-1):
        rep = st.find_horizons(st.SolitonSpec("kdv", A, LINE))
        assert len(rep.horizons) == 2


def test_horizon_symmetry_random_parameters():
    rng = np.random.default_rng(21)
    for _ in range(10):
        line = st.LineParams(r=rng.uniform(0.05, 1.0), c3=rng.uniform(0.1, 0.6))
        spec = st.SolitonSpec("kdv", rng.uniform(1e-3, 0.1), line)
        rep = st.find_horizons(spec)
        scale = abs(rep.eta_white)
        assert rep.eta_black == pytest.approx(-rep.eta_white, abs=1e-10 * scale)
        kappas = [h.kappa for h in rep.horizons]
        assert kappas[0] == pytest.approx(kappas[1], rel=1e-9)


def test_kink_background_has_symmetric_horizon_pair():
    line = st.LineParams(r=0.1, c3=0.0, c4=-0.5)
    spec = st.SolitonSpec("mkdv_minus", 0.1, line)
    rep = st.find_horizons(spec)
    assert len(rep.horizons) == 2
    assert rep.eta_black == pytest.approx(-rep.eta_white, abs=1e-9)
    kappas = [h.kappa for h in rep.horizons]
    assert kappas[0] == pytest.approx(kappas[1], rel=1e-9)


def test_no_horizon_for_flat_background():
    prof = VelocityProfile.from_background(
        lambda eta: np.zeros_like(np.asarray(eta, dtype=float)),
        LINE, v_s=1.001, scan_scale=30.0)
    from stwpa.horizon import _find_horizons_of

    with pytest.raises(NoHorizon):
        _find_horizons_of(prof)


def test_zero_amplitude_request_rejected_at_construction():
    with pytest.raises(ValueError):
        st.SolitonSpec("kdv", 0.0, LINE)


def test_imaginary_velocity_paths():
    prof = VelocityProfile.from_background(
        lambda eta: -4.0 * np.ones_like(np.asarray(eta, dtype=float)),
        LINE, v_s=1.0, scan_scale=10.0)
    with pytest.raises(ImaginaryVelocity):
        prof.velocity(0.0)
    deep_line = st.LineParams(r=0.1, c3=0.0, c4=-2.0)
    spec = st.SolitonSpec("mkdv_minus", 1.2, deep_line)
    with pytest.raises(ImaginaryVelocity):
        st.probe_velocity(spec, 1e3)


def test_metric_components_structure():
    spec = st.SolitonSpec("kdv", REF_A, LINE)
    rep = st.find_horizons(spec)
    m = st.metric_components(spec, rep.eta_black)
    assert abs(m.inverse[1, 1] * m.v) <= 1e-10  # g^{11}, nondimensionalized
    assert m.inverse[0, 1] == m.inverse[1, 0]
    assert np.linalg.det(m.inverse) == pytest.approx(-1.0 / m.v**2, rel=1e-12)
    rng = np.random.default_rng(3)
    for eta in rng.uniform(-60.0, 60.0, 8):
        m = st.metric_components(spec, eta)
        assert np.linalg.det(m.inverse) == pytest.approx(-1.0 / m.v**2, rel=1e-12)
        assert m.inverse[2, 2] == pytest.approx(1.0 / m.v, rel=1e-14)
    far = st.metric_components(spec, 1e9)
    assert far.v == pytest.approx(LINE.v0, abs=1e-14)
    assert far.inverse[0, 0] == pytest.approx(-1.0 / LINE.v0, rel=1e-14)


def _packet(n, center, sigma, amp, spec):
    grid = np.arange(float(n))
    env = amp * np.exp(-0.5 * ((grid - center) / sigma) ** 2)
    bg = st.profile(spec, grid, 0.0)[0]
    local_v = np.sqrt(1.0 + spec.line.c3 * bg + 0.5 * spec.line.c4 * bg**2)
    denv = -(grid - center) / sigma**2 * env
    return st.LatticeState(0.0, env, -local_v * denv)


def test_run_probe_zero_background_matches_linear_lattice():
    cfg = st.LatticeConfig(n_cells=128, r=0.1, c3=REF_C3, c4=0.1, dt_bar=0.05)
    cfg_lin = st.LatticeConfig(n_cells=128, r=0.1, c3=0.0, c4=0.0, dt_bar=0.05)
    spec = st.SolitonSpec("kdv", REF_A, LINE, x0=64.0)
    probe0 = _packet(128, 64.0, 4.0, 1e-4, spec)
    pr = run_probe(None, probe0.copy(), cfg, 20.0, record_stride=80)
    direct = st.run(probe0.copy(), cfg_lin, 20.0, record_stride=80)
    assert np.max(np.abs(pr.phi[-1] - direct.phi[-1])) < 1e-10 * np.max(np.abs(direct.phi[-1]))


def test_run_probe_linearity():
    spec = st.SolitonSpec("kdv", REF_A, LINE, x0=120.0)
    cfg = st.LatticeConfig(n_cells=256, r=REF_R, c3=REF_C3, dt_bar=0.05)
    pa = _packet(256, 100.0, 4.0, 1e-4, spec)
    pb = _packet(256, 140.0, 6.0, 2e-4, spec)
    pab = st.LatticeState(0.0, pa.phi + pb.phi, pa.phi_dot + pb.phi_dot)
    ta = run_probe(spec, pa, cfg, 20.0, record_stride=400)
    tb = run_probe(spec, pb, cfg, 20.0, record_stride=400)
    tab = run_probe(spec, pab, cfg, 20.0, record_stride=400)
    scale = np.max(np.abs(tab.phi[-1]))
    assert np.max(np.abs(tab.phi[-1] - ta.phi[-1] - tb.phi[-1])) < 1e-12 * scale


def test_run_probe_trajectory_background_matches_analytic():
    spec = st.SolitonSpec("kdv", REF_A, LINE, x0=100.0)
    cfg = st.LatticeConfig(n_cells=220, r=REF_R, c3=REF_C3, dt_bar=0.05)
    bg0 = st.seed_initial_state([spec], cfg)
    bg_traj = st.run(bg0, cfg, 20.0, record_stride=1)
    probe0 = _packet(220, 100.0, 4.0, 1e-4, spec)
    via_traj = run_probe(bg_traj, probe0.copy(), cfg, 20.0, record_stride=400)
    via_spec = run_probe(spec, probe0.copy(), cfg, 20.0, record_stride=400)
    scale = np.max(np.abs(via_spec.phi[-1]))
    # differs only through the slow lattice-vs-continuum background drift
    assert np.max(np.abs(via_traj.phi[-1] - via_spec.phi[-1])) < 2e-2 * scale
    assert via_traj.meta["background"] == "Trajectory"


def test_run_probe_linearization_limit_of_full_runs():
    spec = st.SolitonSpec("kdv", REF_A, LINE, x0=100.0)
    cfg = st.LatticeConfig(n_cells=256, r=REF_R, c3=REF_C3, dt_bar=0.05)
    bg0 = st.seed_initial_state([spec], cfg)
    probe0 = _packet(256, 110.0, 4.0, 1.0, spec)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ProbeAmplitudeWarning)
        tangent = run_probe(bg0.copy(), probe0, cfg, 20.0, record_stride=400)
    errs = []
    for eps in (1e-2, 1e-3):
        pert = st.LatticeState(0.0, bg0.phi + eps * probe0.phi,
                               bg0.phi_dot + eps * probe0.phi_dot)
        full = st.run(pert, cfg, 20.0, record_stride=400)
        base = st.run(bg0.copy(), cfg, 20.0, record_stride=400)
        errs.append(np.max(np.abs((full.phi[-1] - base.phi[-1]) / eps - tangent.phi[-1])))
    assert 6.0 < errs[0] / errs[1] < 15.0  # first-order convergence
    assert tangent.meta["background"] == "coevolved"


def test_run_probe_amplitude_warning():
    spec = st.SolitonSpec("kdv", REF_A, LINE, x0=64.0)
    cfg = st.LatticeConfig(n_cells=128, r=REF_R, c3=REF_C3, dt_bar=0.05)
    big = _packet(128, 64.0, 4.0, 0.5 * REF_A, spec)
    with pytest.warns(ProbeAmplitudeWarning):
        run_probe(spec, big, cfg, cfg.dt_bar, record_stride=1)


def test_run_probe_rejects_bad_inputs():
    spec = st.SolitonSpec("kdv", REF_A, LINE, x0=96.0)
    cfg = st.LatticeConfig(n_cells=192, r=REF_R, c3=REF_C3, dt_bar=0.05)
    probe0 = _packet(192, 96.0, 4.0, 1e-4, spec)
    with pytest.raises(TypeError):
        run_probe(3.14, probe0, cfg, 1.0)
    bg = st.run(st.seed_initial_state([spec], cfg), cfg, 1.0, record_stride=1)
    with pytest.raises(ValueError, match="outside recorded"):
        run_probe(bg, probe0, cfg, 5.0, record_stride=10)
