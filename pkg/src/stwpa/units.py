"""Conversion between the dimensionless lattice frame and SI quantities.

The simulation evolves phases on dimensionless time t_bar = omega0 * t and
integer cell coordinates.  The physical scales follow from the circuit
parameters:

    L0     = hbar / (2 e I_c alpha~)     junction inductance at the working point
    omega0 = 1 / sqrt(L0 C_g)            unit-cell frequency
    v0     = a * omega0                  linear wave speed
    r      = C_J / C_g                   dispersion strength

A phase-slope soliton of amplitude A rides at v_s = v0 (1 + c3 A / 6) and is
seen at the line output as a voltage pulse of height (hbar omega0 / 2e) *
(1 + c3 A / 6) * A via the Josephson relation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import E_CHARGE, HBAR
from .errors import InvalidPolarity, NonPositiveInput
from .solitons import LineParams

__all__ = ["CircuitScales", "SolitonObservables", "derive_scales", "soliton_observables"]


@dataclass(frozen=True)
class CircuitScales:
    """Physical scales of one SNAIL transmission-line unit cell.

    C_g, C_J in farads, I_c in amperes, a (cell length) in meters,
    alpha_tilde dimensionless; L0 (henries), omega0 (rad/s), v0 (m/s) and
    r = C_J/C_g are derived.
    """

    C_g: float
    C_J: float
    I_c: float
    a: float
    alpha_tilde: float
    L0: float
    omega0: float
    v0: float
    r: float

    # -- frame conversions (round-trip exact up to floating point) --------
    def t_bar(self, t_seconds):
        """Dimensionless time from seconds."""
        return np.asarray(t_seconds, dtype=float) * self.omega0

    def seconds(self, t_bar):
        """Seconds from dimensionless time."""
        return np.asarray(t_bar, dtype=float) / self.omega0

    def meters(self, n_cells):
        """Position in meters from cell coordinate."""
        return np.asarray(n_cells, dtype=float) * self.a

    def cells(self, x_meters):
        """Cell coordinate from position in meters."""
        return np.asarray(x_meters, dtype=float) / self.a

    def voltage(self, phi_dot_bar):
        """Node voltage (V) from d(phi)/d(t_bar), via V = (hbar/2e) dphi/dt."""
        return np.asarray(phi_dot_bar, dtype=float) * (HBAR / (2.0 * E_CHARGE)) * self.omega0

    def phi_dot_bar(self, voltage_volts):
        """d(phi)/d(t_bar) from a node voltage in volts."""
        return np.asarray(voltage_volts, dtype=float) / ((HBAR / (2.0 * E_CHARGE)) * self.omega0)

    def line(self, c3: float, c4: float = 0.0) -> LineParams:
        """SI-bearing line parameters for soliton/horizon evaluators."""
        return LineParams(r=self.r, c3=c3, c4=c4, a=self.a, v0=self.v0)


@dataclass(frozen=True)
class SolitonObservables:
    """Laboratory-frame observables of a single KdV soliton."""

    v_s: float           # m/s
    V_peak: float        # volts
    half_width_m: float  # meters
    delta_t: float       # seconds


def derive_scales(C_g: float, C_J: float, I_c: float, a: float,
                  alpha_tilde: float) -> CircuitScales:
    """Build CircuitScales from raw circuit parameters (all strictly positive)."""
    for name, value in (("C_g", C_g), ("C_J", C_J), ("I_c", I_c),
                        ("a", a), ("alpha_tilde", alpha_tilde)):
        if not value > 0.0:
            raise NonPositiveInput(f"{name} must be > 0, got {value}")
    L0 = HBAR / (2.0 * E_CHARGE * I_c * alpha_tilde)
    omega0 = 1.0 / np.sqrt(L0 * C_g)
    return CircuitScales(
        C_g=C_g, C_J=C_J, I_c=I_c, a=a, alpha_tilde=alpha_tilde,
        L0=L0, omega0=float(omega0), v0=float(a * omega0), r=C_J / C_g,
    )


def soliton_observables(A: float, c3: float, scales: CircuitScales) -> SolitonObservables:
    """Peak voltage, spatial half-width, temporal width and speed of a KdV
    soliton of dimensionless amplitude A on the given line.

    Requires c3*A > 0 (the KdV polarity condition).  The half-width is the
    sech^2 width 2a*sqrt(12 r / (c3 A)); the temporal width is half-width
    divided by the soliton speed.  The voltage formula rests on the
    single-soliton travelling-wave ansatz; multi-soliton states get
    per-soliton estimates only.
    """
    if not c3 * A > 0.0:
        raise InvalidPolarity(f"KdV soliton requires c3*A > 0, got c3={c3}, A={A}")
    v_s = scales.v0 * (1.0 + c3 * A / 6.0)
    V_peak = (HBAR * scales.omega0 / (2.0 * E_CHARGE)) * (1.0 + c3 * A / 6.0) * A
    half_width_m = 2.0 * scales.a * np.sqrt(12.0 * scales.r / (c3 * A))
    return SolitonObservables(
        v_s=float(v_s),
        V_peak=float(V_peak),
        half_width_m=float(half_width_m),
        delta_t=float(half_width_m / v_s),
    )
