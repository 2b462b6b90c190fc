"""Closed-form soliton solutions of the KdV and mKdV line reductions.

In the continuum limit the lattice supports a quadratic (c3) and a cubic
(c4) nonlinearity.  With one of them tuned away, the unidirectional
long-wave reduction of the line is, in the frame co-moving at v0,

    df/dtau + (c3 v0 / 2) f df/dxi + (r a^2 v0 / 2) d^3f/dxi^3 = 0     (c4 = 0)
    df/dtau + (c4 v0 / 4) f^2 df/dxi + (r a^2 v0 / 2) d^3f/dxi^3 = 0   (c3 = 0)

whose travelling solutions are:

    kdv         A sech^2[k (x - v_s t)],  k = sqrt(c3 A / 12 r)/a,
                v_s = v0 (1 + c3 A / 6)
    mkdv_plus   A sech[k (x - v_s t)],    k = |A| sqrt(c4 / 12 r)/a,
                v_s = v0 (1 + c4 A^2 / 24)      (c4 > 0)
    mkdv_minus  A tanh[k (x - v_s t)],    k = |A| sqrt(|c4| / 12 r)/a,
                v_s = v0 (1 + c4 A^2 / 12)      (c4 < 0)

The two mKdV speeds are fixed by requiring a vanishing travelling-wave
residual; ``evolution_residual`` provides the numerical check that
discriminates them (it converges to zero at 4th order only for the correct
speed).  The ``direction`` field mirrors a solution: the left mover keeps
the same spatial profile and flips the sign of the time derivative.

Caveat for lattice comparisons: these reductions keep only the r = C_J/C_g
dispersion.  The discrete line's second difference adds its own Taylor
dispersion of the same order, equivalent to r -> r + 1/12, so profiles
built here are exact solitary waves of the lattice only when r >> 1/12
(see the lattice module for the measurable consequences).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GridTooCoarse

__all__ = [
    "LineParams",
    "SolitonSpec",
    "KINDS",
    "profile",
    "profile_gradient",
    "soliton_velocity",
    "half_width",
    "width_parameter",
    "evolution_residual",
]

KINDS = ("kdv", "mkdv_plus", "mkdv_minus")


@dataclass(frozen=True)
class LineParams:
    """Transmission-line parameters a soliton lives on.

    Defaults (a = 1, v0 = 1) give the dimensionless lattice frame: positions
    in cells, time in 1/omega0.  ``CircuitScales.line`` produces the SI
    version.
    """

    r: float
    c3: float
    c4: float = 0.0
    a: float = 1.0
    v0: float = 1.0

    def __post_init__(self):
        if self.r <= 0.0:
            raise ValueError(f"r must be > 0 for a dispersive line, got {self.r}")
        if self.a <= 0.0 or self.v0 <= 0.0:
            raise ValueError("a and v0 must be > 0")


@dataclass(frozen=True)
class SolitonSpec:
    """One analytic soliton: kind, amplitude, center and propagation sense.

    amplitude is the dimensionless phase amplitude A (sign = polarity),
    x0 the initial center in the line's length unit, direction +1/-1 for
    right/left motion.  Construction enforces the existence conditions:
    kdv needs c3*A > 0, mkdv_plus needs c4 > 0, mkdv_minus needs c4 < 0.
    """

    kind: str
    amplitude: float
    line: LineParams
    x0: float = 0.0
    direction: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.amplitude == 0.0:
            raise ValueError("soliton amplitude must be nonzero")
        if self.direction not in (1, -1):
            raise ValueError(f"direction must be +1 or -1, got {self.direction}")
        if self.kind == "kdv" and not self.line.c3 * self.amplitude > 0.0:
            raise ValueError(
                f"kdv soliton requires c3*A > 0, got c3={self.line.c3}, A={self.amplitude}"
            )
        if self.kind == "mkdv_plus" and not self.line.c4 > 0.0:
            raise ValueError(f"mkdv_plus requires c4 > 0, got c4={self.line.c4}")
        if self.kind == "mkdv_minus" and not self.line.c4 < 0.0:
            raise ValueError(f"mkdv_minus requires c4 < 0, got c4={self.line.c4}")


def width_parameter(spec: SolitonSpec) -> float:
    """Inverse width k of the profile argument, in 1/length units."""
    line = spec.line
    if spec.kind == "kdv":
        return float(np.sqrt(line.c3 * spec.amplitude / (12.0 * line.r)) / line.a)
    return float(
        abs(spec.amplitude) * np.sqrt(abs(line.c4) / (12.0 * line.r)) / line.a
    )


def half_width(spec: SolitonSpec) -> float:
    """Soliton half-width w = 2/k (the sech^2 width convention).

    For a sech^2 pulse this equals the full width at half maximum divided
    by arccosh(sqrt(2)) ~ 0.8814.
    """
    return 2.0 / width_parameter(spec)


def soliton_velocity(spec: SolitonSpec) -> float:
    """Propagation speed v_s > 0; ``spec.direction`` carries the sense."""
    line, A = spec.line, spec.amplitude
    if spec.kind == "kdv":
        return line.v0 * (1.0 + line.c3 * A / 6.0)
    if spec.kind == "mkdv_plus":
        return line.v0 * (1.0 + line.c4 * A * A / 24.0)
    return line.v0 * (1.0 + line.c4 * A * A / 12.0)


def _sech(z):
    # overflow-free: 2 e^{-|z|} / (1 + e^{-2|z|})
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)


def _shape(kind: str, z):
    if kind == "kdv":
        return _sech(z) ** 2
    if kind == "mkdv_plus":
        return _sech(z)
    return np.tanh(z)


def _shape_derivative(kind: str, z):
    sech = _sech(z)
    if kind == "kdv":
        return -2.0 * sech**2 * np.tanh(z)
    if kind == "mkdv_plus":
        return -sech * np.tanh(z)
    return sech**2


def profile(spec: SolitonSpec, x, t: float = 0.0):
    """Phase profile and its time derivative at positions ``x``, time ``t``.

    Returns (phi, phi_dot) with phi dimensionless and phi_dot in 1/time
    units of the line (1/seconds when the line carries SI scales; per
    t_bar in the dimensionless frame where v0 = a = 1).
    """
    x = np.asarray(x, dtype=float)
    k = width_parameter(spec)
    v_s = soliton_velocity(spec)
    xi = x - spec.x0 - spec.direction * v_s * t
    phi = spec.amplitude * _shape(spec.kind, k * xi)
    phi_dot = -spec.direction * v_s * spec.amplitude * k * _shape_derivative(spec.kind, k * xi)
    return phi, phi_dot


def profile_gradient(spec: SolitonSpec, x, t: float = 0.0):
    """Spatial derivative d(phi)/dx of the profile (1/length units)."""
    x = np.asarray(x, dtype=float)
    k = width_parameter(spec)
    xi = x - spec.x0 - spec.direction * soliton_velocity(spec) * t
    return spec.amplitude * k * _shape_derivative(spec.kind, k * xi)


def _derivative_1(f: np.ndarray, h: float) -> np.ndarray:
    """4th-order central first derivative; valid for indices [2, n-3]."""
    return (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)


def _derivative_3(f: np.ndarray, h: float) -> np.ndarray:
    """4th-order central third derivative; valid for indices [3, n-4]."""
    return (
        f[:-6] - 8.0 * f[1:-5] + 13.0 * f[2:-4] - 13.0 * f[4:-2]
        + 8.0 * f[5:-1] - f[6:]
    ) / (8.0 * h**3)


def _residual_operator(f: np.ndarray, h: float, v_s: float, kind: str,
                       line: LineParams) -> np.ndarray:
    """Travelling-wave residual of the matching evolution equation.

    In the co-moving coordinate eta = x - v_s t a travelling solution
    satisfies (v0 - v_s) f' + N(f) f' + (r a^2 v0 / 2) f''' = 0 with
    N = (c3 v0 / 2) f for kdv and N = (c4 v0 / 4) f^2 for the mKdV kinds.
    All derivatives are spatial, so the check carries no time-differencing
    error.  Valid at interior indices [3, n-4].
    """
    fp = _derivative_1(f, h)[1:-1]
    fppp = _derivative_3(f, h)
    fc = f[3:-3]
    if kind == "kdv":
        nonlinear = 0.5 * line.c3 * line.v0 * fc
    else:
        nonlinear = 0.25 * line.c4 * line.v0 * fc**2
    return (line.v0 - v_s) * fp + nonlinear * fp + 0.5 * line.r * line.a**2 * line.v0 * fppp


def evolution_residual(spec: SolitonSpec, eta: np.ndarray, t: float = 0.0,
                       v_s: float | None = None) -> float:
    """Max-norm residual of the soliton in its own evolution equation.

    ``eta`` is a uniform co-moving grid (eta = x - x0 - direction*v_s*t, so
    the result is independent of ``t``).  The grid must resolve the profile:
    at least 20 samples per half-width.  Converges to zero at 4th order in
    the spacing for the correct speed formula; ``v_s`` can be overridden to
    demonstrate that an incorrect speed leaves a finite plateau.
    """
    eta = np.asarray(eta, dtype=float)
    if eta.ndim != 1 or eta.size < 8:
        raise GridTooCoarse("need a 1-d grid with at least 8 samples")
    steps = np.diff(eta)
    h = float(steps[0])
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise ValueError("eta grid must be uniform")
    if h > half_width(spec) / 20.0:
        raise GridTooCoarse(
            f"spacing {h} exceeds half_width/20 = {half_width(spec) / 20.0}"
        )
    f = spec.amplitude * _shape(spec.kind, width_parameter(spec) * eta)
    if v_s is None:
        v_s = soliton_velocity(spec)
    return float(np.max(np.abs(_residual_operator(f, h, v_s, spec.kind, spec.line))))
