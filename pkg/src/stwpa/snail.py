"""SNAIL potential, its local minimum, and flux-tunable nonlinear coefficients.

A SNAIL is a superconducting loop with one small junction (Josephson energy
``alpha * E_J``) in parallel with two large junctions (energy ``E_J`` each),
threaded by an external flux.  In units of E_J the potential over the small
junction phase ``phi`` is

    U(phi) = -alpha*cos(phi) - 2*cos((phi - phi_ext)/2)

with the additive constant fixed to zero.  Expanding around a local minimum
``phi*`` gives quadratic/cubic/quartic coefficients (alpha~, beta~, gamma~);
the normalized nonlinearities are c3 = beta~/alpha~ and c4 = gamma~/alpha~.
Tuning ``phi_ext`` moves c3 and c4 in opposite senses, so either one can be
nulled on demand.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import NoMinimumFound, NoSignChange

__all__ = [
    "SnailParams",
    "TaylorCoeffs",
    "FluxSweepRow",
    "potential_energy",
    "find_minimum",
    "taylor_coefficients",
    "flux_sweep",
    "find_flux_for_zero",
]

# Tolerances: the stationarity residual |dU/dphi| at a returned minimum and
# the |coefficient| target for flux root finding.  Both sit far below the
# two-significant-figure scale of the physical estimates built on top.
MINIMUM_GRAD_TOL = 1e-12
FLUX_ROOT_TOL = 1e-10

_SCAN_POINTS = 4001  # odd, so the scan grid contains phi_ext exactly


@dataclass(frozen=True)
class SnailParams:
    """Flux-bias configuration of a single SNAIL.

    alpha   : ratio of small-to-large junction Josephson energies, in (0, 1).
    phi_ext : external flux phase 2*pi*Phi_ext/Phi_0, radians.  Any finite
              value is accepted; the potential is 4*pi-periodic in phi_ext
              at fixed phi (and 2*pi-periodic up to a 2*pi shift of phi).
    """

    alpha: float
    phi_ext: float

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not math.isfinite(self.phi_ext):
            raise ValueError(f"phi_ext must be finite, got {self.phi_ext}")


@dataclass(frozen=True)
class TaylorCoeffs:
    """Expansion of the SNAIL potential around a local minimum phi*.

    alpha_tilde, beta_tilde, gamma_tilde are the 2nd, 3rd and 4th phi
    derivatives of U at phi* (units of E_J); c3 = beta_tilde/alpha_tilde and
    c4 = gamma_tilde/alpha_tilde are the normalized nonlinearities.
    """

    phi_star: float
    alpha_tilde: float
    beta_tilde: float
    gamma_tilde: float
    c3: float
    c4: float


@dataclass(frozen=True)
class FluxSweepRow:
    """One flux point of a sweep; ``ok`` is False when no minimum was found."""

    phi_ext: float
    phi_star: float
    alpha_tilde: float
    c3: float
    c4: float
    ok: bool = True


def potential_energy(phi, p: SnailParams):
    """SNAIL potential U(phi) in units of E_J (additive constant dropped)."""
    phi = np.asarray(phi, dtype=float)
    u = -p.alpha * np.cos(phi) - 2.0 * np.cos(0.5 * (phi - p.phi_ext))
    return u if u.ndim else float(u)


def _du(phi, p: SnailParams):
    return p.alpha * np.sin(phi) + np.sin(0.5 * (phi - p.phi_ext))


def _d2u(phi, p: SnailParams):
    return p.alpha * np.cos(phi) + 0.5 * np.cos(0.5 * (phi - p.phi_ext))


def _d3u(phi, p: SnailParams):
    return -p.alpha * np.sin(phi) - 0.25 * np.sin(0.5 * (phi - p.phi_ext))


def _d4u(phi, p: SnailParams):
    return -p.alpha * np.cos(phi) - 0.125 * np.cos(0.5 * (phi - p.phi_ext))


def find_minimum(p: SnailParams, guess: float | None = None) -> float:
    """Locate the local potential minimum phi* nearest to ``guess``.

    Scans dU/dphi for sign changes over [phi_ext - 2*pi, phi_ext + 2*pi]
    (one full period of the two-junction branch), brackets each root with
    positive curvature, then Newton-polishes until |dU/dphi| < 1e-12.
    When several minima exist the one closest to the guess is returned;
    the default guess is phi_ext itself, which tracks the small-alpha
    branch phi* = phi_ext.

    Raises NoMinimumFound if the scan window contains no minimum.
    """
    if guess is None:
        guess = p.phi_ext
    lo, hi = p.phi_ext - 2.0 * np.pi, p.phi_ext + 2.0 * np.pi
    grid = np.linspace(lo, hi, _SCAN_POINTS)
    g = _du(grid, p)

    candidates = []
    for i in range(_SCAN_POINTS - 1):
        if g[i] == 0.0:
            if _d2u(grid[i], p) > 0.0:
                candidates.append(grid[i])
        elif g[i] * g[i + 1] < 0.0:
            root = brentq(_du, grid[i], grid[i + 1], args=(p,), xtol=1e-14)
            if _d2u(root, p) > 0.0:
                candidates.append(root)
    if g[-1] == 0.0 and _d2u(grid[-1], p) > 0.0:
        candidates.append(grid[-1])

    if not candidates:
        raise NoMinimumFound(
            f"no potential minimum for alpha={p.alpha}, phi_ext={p.phi_ext}"
        )

    phi_star = min(candidates, key=lambda c: abs(c - guess))
    for _ in range(4):
        slope = _du(phi_star, p)
        if abs(slope) < MINIMUM_GRAD_TOL:
            break
        phi_star -= slope / _d2u(phi_star, p)
    if abs(_du(phi_star, p)) >= MINIMUM_GRAD_TOL or _d2u(phi_star, p) <= 0.0:
        raise NoMinimumFound(
            f"minimum polish failed near phi={phi_star} "
            f"(alpha={p.alpha}, phi_ext={p.phi_ext})"
        )
    return float(phi_star)


def taylor_coefficients(p: SnailParams, guess: float | None = None) -> TaylorCoeffs:
    """Expansion coefficients at the minimum nearest ``guess``.

    Uses the closed-form derivatives of the potential:
        alpha~ =  alpha*cos(phi*) + cos((phi*-phi_ext)/2)/2
        beta~  = -alpha*sin(phi*) - sin((phi*-phi_ext)/2)/4
        gamma~ = -alpha*cos(phi*) - cos((phi*-phi_ext)/2)/8
    """
    phi_star = find_minimum(p, guess)
    alpha_tilde = float(_d2u(phi_star, p))
    beta_tilde = float(_d3u(phi_star, p))
    gamma_tilde = float(_d4u(phi_star, p))
    return TaylorCoeffs(
        phi_star=phi_star,
        alpha_tilde=alpha_tilde,
        beta_tilde=beta_tilde,
        gamma_tilde=gamma_tilde,
        c3=beta_tilde / alpha_tilde,
        c4=gamma_tilde / alpha_tilde,
    )


def flux_sweep(
    alpha: float,
    phi_ext_grid: Sequence[float] | Iterable[float],
    parallel: bool = False,
    max_workers: int | None = None,
) -> list[FluxSweepRow]:
    """Evaluate (c3, c4) across a flux grid, tracking one minimum branch.

    The branch is kept continuous by seeding each point's minimum search
    with the previous point's phi* (continuation).  Points where no minimum
    exists are emitted with ok=False rather than dropped.

    With ``parallel=True`` the grid is first walked sequentially on a coarse
    subsample to fix the branch, then all points are evaluated concurrently,
    each seeded from the nearest coarse-pass phi*.  Results are identical to
    the sequential sweep for any branch the coarse pass resolves.
    """
    grid = [float(v) for v in phi_ext_grid]
    if not grid:
        return []

    if parallel and len(grid) > 2:
        stride = max(1, len(grid) // 32)
        coarse_idx = list(range(0, len(grid), stride))
        if coarse_idx[-1] != len(grid) - 1:
            coarse_idx.append(len(grid) - 1)
        coarse = {}
        guess = None
        for i in coarse_idx:
            try:
                coarse[i] = find_minimum(SnailParams(alpha, grid[i]), guess)
                guess = coarse[i]
            except NoMinimumFound:
                pass

        def seed_for(i: int) -> float | None:
            if not coarse:
                return None
            j = min(coarse, key=lambda k: abs(k - i))
            return coarse[j]

        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(lambda i: _sweep_row(alpha, grid[i], seed_for(i)),
                                 range(len(grid))))

    rows = []
    guess = None
    for phi_ext in grid:
        row = _sweep_row(alpha, phi_ext, guess)
        rows.append(row)
        if row.ok:
            guess = row.phi_star
    return rows


def _sweep_row(alpha: float, phi_ext: float, guess: float | None) -> FluxSweepRow:
    try:
        tc = taylor_coefficients(SnailParams(alpha, phi_ext), guess)
    except NoMinimumFound:
        nan = float("nan")
        return FluxSweepRow(phi_ext, nan, nan, nan, nan, ok=False)
    return FluxSweepRow(phi_ext, tc.phi_star, tc.alpha_tilde, tc.c3, tc.c4)


def find_flux_for_zero(
    which: str,
    alpha: float,
    bracket: tuple[float, float],
    tol: float = FLUX_ROOT_TOL,
) -> float:
    """Flux phi_ext at which the selected coefficient (``"c3"`` or ``"c4"``)
    vanishes, by bisection over ``bracket``.

    The minimum branch is continued from the low bracket end so the
    coefficient stays a continuous function of flux during the search.
    Raises NoSignChange when the coefficient has the same sign at both ends.
    """
    if which not in ("c3", "c4"):
        raise ValueError(f"which must be 'c3' or 'c4', got {which!r}")
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo < hi:
        raise ValueError(f"empty bracket {bracket}")

    def coeff(phi_ext: float, guess: float | None) -> tuple[float, float]:
        tc = taylor_coefficients(SnailParams(alpha, phi_ext), guess)
        return getattr(tc, which), tc.phi_star

    c_lo, star_lo = coeff(lo, None)
    c_hi, star_hi = coeff(hi, star_lo)
    if abs(c_lo) < tol:
        return lo
    if abs(c_hi) < tol:
        return hi
    if np.sign(c_lo) == np.sign(c_hi):
        raise NoSignChange(
            f"{which} has the same sign at both bracket ends: "
            f"{which}({lo})={c_lo:.3e}, {which}({hi})={c_hi:.3e}"
        )

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        c_mid, star_mid = coeff(mid, 0.5 * (star_lo + star_hi))
        if abs(c_mid) < tol:
            return mid
        if np.sign(c_mid) == np.sign(c_lo):
            lo, c_lo, star_lo = mid, c_mid, star_mid
        else:
            hi, c_hi, star_hi = mid, c_mid, star_mid
        if hi - lo < 1e-15 * max(1.0, abs(lo)):
            break
    raise NoSignChange(
        f"bisection stalled: |{which}|={abs(c_mid):.3e} at phi_ext={mid}"
    )
