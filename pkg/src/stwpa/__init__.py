"""stwpa: solitons and analogue black/white-hole horizons on SNAIL lines.

The pipeline mirrors the physics: flux-tunable junction nonlinearities
(:mod:`stwpa.snail`) set the coefficients of a discrete nonlinear
transmission line (:mod:`stwpa.lattice`), whose long-wave limit carries
KdV/mKdV solitons (:mod:`stwpa.solitons`, :mod:`stwpa.units`); a soliton
background modulates the speed of a weak probe, forming horizon pairs
(:mod:`stwpa.horizon`); and inverse scattering predicts the soliton content
of injected pulses (:mod:`stwpa.scattering`).
"""

__version__ = "0.1.0"

from .constants import E_CHARGE, FLUX_QUANTUM, HBAR, K_B
from .horizon import (
    EffectiveMetric,
    Horizon,
    HorizonReport,
    VelocityProfile,
    find_horizons,
    metric_components,
    probe_velocity,
    run_probe,
    velocity_profile,
)
from .lattice import (
    LatticeConfig,
    LatticeState,
    MassMatrixSolver,
    SolitonMeasurement,
    Trajectory,
    accelerations,
    conserved_sums,
    measure_soliton,
    run,
    seed_initial_state,
    shape_deviation,
    step,
)
from .scattering import (
    LatticeValidation,
    ScatteringReport,
    predict_amplitudes,
    schrodinger_spectrum,
    validate_against_lattice,
)
from .snail import (
    FluxSweepRow,
    SnailParams,
    TaylorCoeffs,
    find_flux_for_zero,
    find_minimum,
    flux_sweep,
    potential_energy,
    taylor_coefficients,
)
from .solitons import (
    LineParams,
    SolitonSpec,
    evolution_residual,
    half_width,
    profile,
    profile_gradient,
    soliton_velocity,
    width_parameter,
)
from .units import CircuitScales, SolitonObservables, derive_scales, soliton_observables
