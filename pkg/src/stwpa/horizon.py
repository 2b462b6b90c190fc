"""Probe-field velocity on a soliton background, horizons, and probe runs.

A weak probe riding on a background phase profile phi_bar sees the local
speed

    v(eta) = v0 * sqrt(1 + c3*phi_bar + (c4/2)*phi_bar^2)

in the frame co-moving with the soliton (eta = x - v_s t).  Where v(eta)
crosses the soliton speed v_s the effective metric component g_11 vanishes:
the trailing-edge crossing acts as a black-hole horizon, the leading-edge
one as a white-hole horizon.  The surface gravity is taken as
kappa = |dv/deta| at the crossing and the analogue Hawking temperature as
T_H = hbar*kappa/(2*pi*k_B), the standard analogue-gravity convention;
both are convention-dependent quantities and are only physical when the
line carries SI scales.

``run_probe`` evolves the discrete linearization of the circuit equations,

    (I - r D2) dphi_ddot = D2[(1 + c3*phi_bar + (c4/2)*phi_bar^2) dphi],

about an analytic soliton, a recorded trajectory (cubic time interpolation)
or a co-evolved lattice background (the exact tangent of the RK4 map, used
for linearization-limit checks).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .constants import HBAR, K_B
from .errors import ImaginaryVelocity, NoHorizon, ProbeAmplitudeWarning
from .lattice import (
    LatticeConfig,
    LatticeState,
    MassMatrixSolver,
    Trajectory,
    _nonlinear_flux,
)
from .solitons import (
    LineParams,
    SolitonSpec,
    half_width,
    profile,
    profile_gradient,
    soliton_velocity,
)

__all__ = [
    "VelocityProfile",
    "Horizon",
    "HorizonReport",
    "EffectiveMetric",
    "velocity_profile",
    "probe_velocity",
    "find_horizons",
    "metric_components",
    "run_probe",
]

HORIZON_NOTE = (
    "kappa = |dv/deta| at v(eta) = v_s; T_H = hbar*kappa/(2*pi*k_B). "
    "Normalization is convention-dependent."
)


class VelocityProfile:
    """Probe speed v(eta) in the background's co-moving frame.

    Built from a SolitonSpec (analytic background, exact derivative) or,
    via ``from_background``, from any callable phase profile -- e.g. a
    lattice-measured pulse or a degenerate flat background.
    """

    def __init__(self, spec: SolitonSpec):
        self.spec = spec
        self.line = spec.line
        self.v_s = soliton_velocity(spec)
        self.scan_scale = half_width(spec)
        centered = SolitonSpec(spec.kind, spec.amplitude, spec.line,
                               x0=0.0, direction=spec.direction)
        self._phi = lambda eta: profile(centered, eta, 0.0)[0]
        self._dphi = lambda eta: profile_gradient(centered, eta, 0.0)

    @classmethod
    def from_background(cls, phi_of_eta: Callable, line: LineParams, v_s: float,
                        scan_scale: float, dphi_deta: Callable | None = None):
        """Profile over an arbitrary background phase phi(eta)."""
        obj = cls.__new__(cls)
        obj.spec = None
        obj.line = line
        obj.v_s = float(v_s)
        obj.scan_scale = float(scan_scale)
        obj._phi = phi_of_eta
        if dphi_deta is None:
            h = 1e-6 * obj.scan_scale
            dphi_deta = lambda eta: (phi_of_eta(eta + h) - phi_of_eta(eta - h)) / (2.0 * h)
        obj._dphi = dphi_deta
        return obj

    def background(self, eta):
        return self._phi(np.asarray(eta, dtype=float))

    def radicand(self, eta):
        phi = self.background(eta)
        return 1.0 + self.line.c3 * phi + 0.5 * self.line.c4 * phi**2

    def velocity(self, eta):
        """v(eta); raises ImaginaryVelocity when the radicand is <= 0."""
        rad = self.radicand(eta)
        if np.any(rad <= 0.0):
            raise ImaginaryVelocity(
                "probe velocity radicand <= 0: background amplitude is unphysical"
            )
        return self.line.v0 * np.sqrt(rad)

    def velocity_gradient(self, eta):
        """dv/deta, analytic through the chain rule."""
        phi = self.background(eta)
        rad = 1.0 + self.line.c3 * phi + 0.5 * self.line.c4 * phi**2
        if np.any(rad <= 0.0):
            raise ImaginaryVelocity(
                "probe velocity radicand <= 0: background amplitude is unphysical"
            )
        dphi = self._dphi(np.asarray(eta, dtype=float))
        return self.line.v0 * (self.line.c3 + self.line.c4 * phi) * dphi / (2.0 * np.sqrt(rad))


@dataclass(frozen=True)
class Horizon:
    """One horizon: comoving position, kind, surface gravity, temperature."""

    eta: float
    kind: str                     # "black" | "white"
    kappa: float                  # |dv/deta|, 1/s when the line is SI
    hawking_temperature: float    # hbar*kappa/(2*pi*k_B), kelvin when SI


@dataclass(frozen=True)
class HorizonReport:
    """Horizon pair and region decomposition for a soliton background.

    Regions follow the black/white pair picture: I is the black-hole
    interior (behind the trailing horizon), II the exterior between the
    horizons, III the white-hole interior beyond the leading horizon.
    """

    v_s: float
    horizons: tuple[Horizon, ...]
    eta_black: float
    eta_white: float
    note: str = HORIZON_NOTE

    def region_of(self, eta: float) -> str:
        lo, hi = sorted((self.eta_black, self.eta_white))
        if eta < lo:
            return "I" if self.eta_black < self.eta_white else "III"
        if eta > hi:
            return "III" if self.eta_black < self.eta_white else "I"
        return "II"


def velocity_profile(spec: SolitonSpec) -> VelocityProfile:
    return VelocityProfile(spec)


def probe_velocity(spec: SolitonSpec, eta):
    """Probe speed v(eta) = v0*sqrt(1 + c3*phi_bar + c4*phi_bar^2/2) on the
    analytic background."""
    return velocity_profile(spec).velocity(eta)


def _find_horizons_of(prof: VelocityProfile, span: float = 6.0,
                      scan_points: int = 4001) -> HorizonReport:
    scale = prof.scan_scale
    eta = np.linspace(-span * scale, span * scale, scan_points)
    g = prof.velocity(eta) - prof.v_s

    roots = []
    for i in range(eta.size - 1):
        if g[i] == 0.0:
            roots.append(eta[i])
        elif g[i] * g[i + 1] < 0.0:
            roots.append(brentq(lambda e: prof.velocity(e) - prof.v_s,
                                eta[i], eta[i + 1], xtol=1e-15 * scale))
    if g[-1] == 0.0:
        roots.append(eta[-1])
    if not roots:
        raise NoHorizon("probe velocity never crosses the soliton velocity")

    direction = prof.spec.direction if prof.spec is not None else 1
    horizons = []
    for root in roots:
        # Newton polish on v(eta) - v_s to push the residual to the floor.
        for _ in range(3):
            dv = prof.velocity_gradient(root)
            if dv == 0.0:
                break
            root = root - (float(prof.velocity(root)) - prof.v_s) / float(dv)
        kappa = abs(float(prof.velocity_gradient(root)))
        kind = "black" if direction * float(prof.velocity_gradient(root)) > 0.0 else "white"
        horizons.append(Horizon(
            eta=float(root), kind=kind, kappa=kappa,
            hawking_temperature=HBAR * kappa / (2.0 * math.pi * K_B),
        ))
    horizons.sort(key=lambda h: h.eta)

    blacks = [h for h in horizons if h.kind == "black"]
    whites = [h for h in horizons if h.kind == "white"]
    if len(blacks) != 1 or len(whites) != 1:
        raise NoHorizon(
            f"expected one black/white pair, found {len(blacks)} black and "
            f"{len(whites)} white crossings"
        )
    return HorizonReport(
        v_s=prof.v_s,
        horizons=tuple(horizons),
        eta_black=blacks[0].eta,
        eta_white=whites[0].eta,
    )


def find_horizons(spec: SolitonSpec, span: float = 6.0,
                  scan_points: int = 4001) -> HorizonReport:
    """Locate the horizon pair of an analytic soliton background.

    Scans v(eta) - v_s over +-span half-widths, brackets each sign change,
    and polishes with Newton on the analytic gradient; at the returned
    roots |v - v_s| sits at the floating-point floor (<= 1e-12 v0).  The
    root where v rises through v_s along the propagation direction is the
    black (trailing) horizon, the other the white (leading) one.
    """
    return _find_horizons_of(velocity_profile(spec), span, scan_points)


@dataclass(frozen=True)
class EffectiveMetric:
    """Inverse metric g^{mu nu} seen by the probe phase potential at one eta.

    inverse = (1/v) * [[-1, v_s, 0, 0],
                       [v_s, v^2 - v_s^2, 0, 0],
                       [0, 0, 1, 0],
                       [0, 0, 0, 1]]

    so det(g^{mu nu}) = -1/v^2 and the (1,1) component vanishes exactly at a
    horizon.
    """

    eta: float
    v: float
    v_s: float
    inverse: np.ndarray


def metric_components(spec: SolitonSpec, eta: float) -> EffectiveMetric:
    prof = velocity_profile(spec)
    v = float(prof.velocity(float(eta)))
    v_s = prof.v_s
    g = np.zeros((4, 4))
    g[0, 0] = -1.0
    g[0, 1] = g[1, 0] = v_s
    g[1, 1] = v * v - v_s * v_s
    g[2, 2] = g[3, 3] = 1.0
    return EffectiveMetric(eta=float(eta), v=v, v_s=v_s, inverse=g / v)


def _background_supplier(background, cfg: LatticeConfig):
    """Return (phi_bar(t_bar) callable | None for co-evolution, scale)."""
    if background is None:
        zeros = np.zeros(cfg.n_cells)
        return (lambda t_bar: zeros), 0.0
    if isinstance(background, SolitonSpec):
        x = cfg.a * np.arange(cfg.n_cells, dtype=float)
        omega0 = background.line.v0 / background.line.a
        return (lambda t_bar: profile(background, x, t_bar / omega0)[0],
                abs(background.amplitude))
    if isinstance(background, Trajectory):
        spline = CubicSpline(background.t_bar, background.phi, axis=0)
        t_lo, t_hi = background.t_bar[0], background.t_bar[-1]

        def sample(t_bar):
            if t_bar < t_lo - 1e-9 or t_bar > t_hi + 1e-9:
                raise ValueError(
                    f"probe time {t_bar} outside recorded background "
                    f"[{t_lo}, {t_hi}]"
                )
            return spline(t_bar)

        return sample, float(np.max(np.abs(background.phi)))
    raise TypeError(
        "background must be a SolitonSpec, Trajectory, LatticeState or None"
    )


def run_probe(background, probe: LatticeState, cfg: LatticeConfig,
              t_bar_end: float, record_stride: int = 100) -> Trajectory:
    """Evolve the linearized probe field on a background.

    ``background`` may be a SolitonSpec (exact analytic sampling), a
    recorded Trajectory (cubic interpolation in t_bar), a LatticeState
    (background co-evolved through the same RK4 stages, i.e. the exact
    tangent of the nonlinear step map) or None (vacuum).  The probe state
    carries (dphi, dphi_dot) at the start time.  Warns when the probe
    amplitude exceeds a tenth of the background amplitude.
    """
    if probe.phi.size != cfg.n_cells:
        raise ValueError("probe state size does not match config")
    n_steps = int(round((t_bar_end - probe.t_bar) / cfg.dt_bar))
    if n_steps < 0:
        raise ValueError("t_bar_end precedes the probe start time")
    solver = MassMatrixSolver(cfg.n_cells, cfg.r, cfg.boundary)
    dt = cfg.dt_bar
    half = 0.5 * dt

    coevolve = isinstance(background, LatticeState)
    if coevolve:
        bg_phi = background.phi.copy()
        bg_dot = background.phi_dot.copy()
        scale = float(np.max(np.abs(bg_phi)))
        supplier = None
    else:
        supplier, scale = _background_supplier(background, cfg)

    ratio = float(np.max(np.abs(probe.phi)) / scale) if scale > 0.0 else float("inf")
    if background is not None and ratio > 0.1:
        warnings.warn(
            f"probe/background amplitude ratio {ratio:.3g} exceeds 0.1; "
            "linearization may be inaccurate",
            ProbeAmplitudeWarning,
            stacklevel=2,
        )

    def probe_accel(dphi, phi_bar):
        factor = 1.0 + cfg.c3 * phi_bar + 0.5 * cfg.c4 * phi_bar**2
        return solver.solve(solver.laplacian(factor * dphi))

    def bg_accel(phi_bar):
        return solver.solve(solver.laplacian(_nonlinear_flux(phi_bar, cfg.c3, cfg.c4)))

    t0 = probe.t_bar
    phi, dot = probe.phi.copy(), probe.phi_dot.copy()
    times = [t0]
    phis = [phi.copy()]
    dots = [dot.copy()]
    for i in range(1, n_steps + 1):
        t = t0 + (i - 1) * dt
        if coevolve:
            # Tangent-linear RK4: each probe stage uses the matching RK4
            # stage value of the co-evolved nonlinear background.
            b1 = bg_phi
            a1b = bg_accel(b1)
            k1 = probe_accel(phi, b1)
            b2 = bg_phi + half * bg_dot
            v2b = bg_dot + half * a1b
            a2b = bg_accel(b2)
            p2 = phi + half * dot
            v2 = dot + half * k1
            k2 = probe_accel(p2, b2)
            b3 = bg_phi + half * v2b
            v3b = bg_dot + half * a2b
            a3b = bg_accel(b3)
            p3 = phi + half * v2
            v3 = dot + half * k2
            k3 = probe_accel(p3, b3)
            b4 = bg_phi + dt * v3b
            v4b = bg_dot + dt * a3b
            a4b = bg_accel(b4)
            p4 = phi + dt * v3
            v4 = dot + dt * k3
            k4 = probe_accel(p4, b4)
            bg_phi = bg_phi + (dt / 6.0) * (bg_dot + 2.0 * (v2b + v3b) + v4b)
            bg_dot = bg_dot + (dt / 6.0) * (a1b + 2.0 * (a2b + a3b) + a4b)
        else:
            b1 = supplier(t)
            bmid = supplier(t + half)
            b4 = supplier(t + dt)
            k1 = probe_accel(phi, b1)
            p2 = phi + half * dot
            v2 = dot + half * k1
            k2 = probe_accel(p2, bmid)
            p3 = phi + half * v2
            v3 = dot + half * k2
            k3 = probe_accel(p3, bmid)
            p4 = phi + dt * v3
            v4 = dot + dt * k3
            k4 = probe_accel(p4, b4)
        phi = phi + (dt / 6.0) * (dot + 2.0 * (v2 + v3) + v4)
        dot = dot + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        if i % record_stride == 0 or i == n_steps:
            times.append(t0 + i * dt)
            phis.append(phi.copy())
            dots.append(dot.copy())
    kind = "coevolved" if coevolve else type(background).__name__
    return Trajectory(cfg, np.array(times), np.array(phis), np.array(dots),
                      meta={"background": kind, "probe_background_ratio": ratio})
