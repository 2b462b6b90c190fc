"""Figure rendering for the CLI report path.

Every function returns a matplotlib Figure built from already-computed
data; ``save_figure`` writes it next to the delimited output.  The Agg
backend is forced so rendering works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "flux_sweep_figure",
    "profile_figure",
    "trajectory_figure",
    "velocity_profile_figure",
    "probe_audit_figure",
    "spectrum_figure",
    "save_figure",
]


def save_figure(fig, path, dpi: int = 150) -> None:
    fig.savefig(path, dpi=dpi, bbox_inches="tight")
    plt.close(fig)


def flux_sweep_figure(phi_ext, c3, c4):
    """c3 and c4 versus external flux (in units of pi)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    x = np.asarray(phi_ext) / np.pi
    ax.plot(x, c3, "-", label="$c_3$")
    ax.plot(x, c4, "--", label="$c_4$")
    ax.axhline(0.0, color="0.7", lw=0.8)
    ax.set_xlabel(r"$\phi_\mathrm{ext}/\pi$")
    ax.set_ylabel("normalized nonlinearity")
    ax.legend()
    return fig


def profile_figure(x_cells, phi, phi_dot=None):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(x_cells, phi, "-", label=r"$\phi$")
    if phi_dot is not None:
        ax.plot(x_cells, phi_dot, "--", label=r"$\dot\phi$")
        ax.legend()
    ax.set_xlabel("cell $n$")
    ax.set_ylabel("phase")
    return fig


def trajectory_figure(traj, max_frames: int = 8, offset: float | None = None):
    """Waterfall of snapshots, each offset vertically by its time order."""
    idx = np.linspace(0, len(traj) - 1, min(max_frames, len(traj))).astype(int)
    if offset is None:
        offset = 1.2 * float(np.max(np.abs(traj.phi)))
    fig, ax = plt.subplots(figsize=(6.0, 6.0))
    n = np.arange(traj.config.n_cells)
    for rank, i in enumerate(idx):
        ax.plot(n, traj.phi[i] + rank * offset, "-", lw=1.0)
        ax.text(n[-1], rank * offset, rf"  $\bar t={traj.t_bar[i]:g}$",
                va="center", fontsize=8)
    ax.set_xlabel("cell $n$")
    ax.set_ylabel(r"$\phi_n$ (offset per snapshot)")
    ax.set_yticks([])
    return fig


def velocity_profile_figure(eta_over_a, v_over_v0, v_s_over_v0,
                            eta_black_over_a, eta_white_over_a):
    """Probe velocity across the soliton with the horizon pair marked."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(eta_over_a, v_over_v0, "-")
    ax.axhline(v_s_over_v0, color="0.3", ls="--", lw=0.9, label="$v_s$")
    ax.axvline(eta_black_over_a, color="0.6", ls=":", lw=0.9)
    ax.axvline(eta_white_over_a, color="0.6", ls=":", lw=0.9)
    ax.plot([eta_black_over_a], [v_s_over_v0], "ko", label="black horizon")
    ax.plot([eta_white_over_a], [v_s_over_v0], "o", mfc="none", mec="k",
            label="white horizon")
    lo, hi = sorted((eta_black_over_a, eta_white_over_a))
    ymin = float(np.min(v_over_v0))
    for x, label in ((0.5 * (eta_over_a[0] + lo), "I"),
                     (0.5 * (lo + hi), "II"),
                     (0.5 * (hi + eta_over_a[-1]), "III")):
        ax.text(x, ymin, label, ha="center", va="bottom")
    ax.set_xlabel(r"$\eta/a$")
    ax.set_ylabel("$v/v_0$")
    ax.legend(loc="upper right", fontsize=8)
    return fig


def probe_audit_figure(t_bar, eta_centroid_over_a, eta_black_over_a,
                       eta_white_over_a):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(t_bar, eta_centroid_over_a, "-", label="probe centroid")
    ax.axhline(eta_black_over_a, color="k", ls="--", lw=0.9, label="black horizon")
    ax.axhline(eta_white_over_a, color="k", ls=":", lw=0.9, label="white horizon")
    ax.set_xlabel(r"$\bar t$")
    ax.set_ylabel(r"$\eta/a$")
    ax.legend(fontsize=8)
    return fig


def spectrum_figure(x, potential, eigenvalues):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(x, potential, "-", label="$V(x)$")
    for e in eigenvalues:
        ax.axhline(e, color="0.4", ls="--", lw=0.8)
    ax.axhline(0.0, color="0.8", lw=0.8)
    ax.set_xlabel("$x$")
    ax.set_ylabel("energy")
    ax.legend()
    return fig
