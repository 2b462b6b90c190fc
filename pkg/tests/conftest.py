"""Shared fixtures: the expensive lattice runs are session-scoped so the
unit tests and the acceptance gate reuse one integration each."""

import pytest

import stwpa as st

from helpers import REF_A, REF_C3, REF_R


@pytest.fixture(scope="session")
def ref_line():
    return st.LineParams(r=REF_R, c3=REF_C3)


@pytest.fixture(scope="session")
def ref_spec(ref_line):
    return st.SolitonSpec("kdv", REF_A, ref_line, x0=100.0)


@pytest.fixture(scope="session")
def transit_run(ref_spec):
    """Reference soliton crossing 200 cells on the discrete line."""
    cfg = st.LatticeConfig(n_cells=450, r=REF_R, c3=REF_C3, dt_bar=0.05)
    state = st.seed_initial_state([ref_spec], cfg)
    return st.run(state, cfg, 200.0, record_stride=100)


@pytest.fixture(scope="session")
def control_run(ref_spec):
    """Same initial data evolved with the nonlinearity switched off."""
    cfg = st.LatticeConfig(n_cells=450, r=REF_R, c3=0.0, c4=0.0, dt_bar=0.05)
    state = st.seed_initial_state([ref_spec], cfg)
    return st.run(state, cfg, 200.0, record_stride=400)


@pytest.fixture(scope="session")
def collision_run():
    """Reference two-soliton collision (right 0.04 at cell 110, left 0.02 at
    cell 190), run until the pulses have fully re-separated."""
    line = st.LineParams(r=REF_R, c3=REF_C3)
    right = st.SolitonSpec("kdv", 0.04, line, x0=110.0, direction=1)
    left = st.SolitonSpec("kdv", 0.02, line, x0=190.0, direction=-1)
    cfg = st.LatticeConfig(n_cells=300, r=REF_R, c3=REF_C3, dt_bar=0.05)
    state = st.seed_initial_state([right, left], cfg)
    traj = st.run(state, cfg, 100.0, record_stride=200)
    return traj, right, left
