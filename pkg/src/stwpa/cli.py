"""Command-line entry point.

Subcommands mirror the library: ``coeffs`` (flux sweep), ``units`` (SI
scales and soliton estimates), ``soliton`` (analytic profile CSV),
``simulate`` / ``collide`` (lattice runs), ``horizons`` (velocity profile
and horizon report), ``probe`` (linearized probe run with a horizon audit),
``predict`` (inverse-scattering soliton content) and ``replay`` (re-run a
recorded manifest).

Every run writes its delimited/JSON output plus a ``*.manifest.json``
capturing the resolved parameters; report-path subcommands also render a
matplotlib figure next to the delimited output (``--no-plot`` disables).
Exit codes: 0 success, 2 parameter error, 3 numerical failure.  The output
root is ``--out-dir``, else ``$STWPA_OUT_DIR``, else the working directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from .errors import SimulationError
from .horizon import find_horizons, run_probe, velocity_profile
from .lattice import (
    LatticeConfig,
    LatticeState,
    Trajectory,
    measure_soliton,
    run,
    seed_initial_state,
    shape_deviation,
)
from .manifest import build_manifest, load_manifest, manifest_digest, write_manifest
from .scattering import predict_amplitudes, validate_against_lattice
from .snail import SnailParams, flux_sweep, taylor_coefficients
from .solitons import (
    LineParams,
    SolitonSpec,
    half_width,
    profile,
    soliton_velocity,
)
from .units import derive_scales, soliton_observables

REFERENCE = {
    "alpha": 0.2,
    "flux": 1.19 * math.pi,
    "c3": 0.32,
    "c4": 0.0,
    "r": 0.1,
    "amplitude": 0.02,
    "C_g": 100e-15,
    "C_J": 10e-15,
    "I_c": 1.5e-6,
    "cell": 10e-6,
    "alpha_tilde": 0.37,
    "amp_right": 0.04,
    "amp_left": 0.02,
    "center_right": 110.0,
    "center_left": 190.0,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "sweep", None):
        return _run_sweep(args)
    try:
        return args.handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

def _add_common(sub, default_out: str):
    sub.add_argument("--out", default=default_out, metavar="BASENAME",
                     help="output basename (default: %(default)s)")
    sub.add_argument("--out-dir", default=None, metavar="DIR",
                     help="output directory (default: $STWPA_OUT_DIR or '.')")
    sub.add_argument("--no-plot", action="store_true",
                     help="skip the figure rendered next to the delimited output")
    sub.add_argument("--sweep", default=None, metavar="FLAG=V1,V2,...",
                     help="fan out one run per value, isolated output dirs")


def _add_line_flags(sub, amplitude=REFERENCE["amplitude"]):
    sub.add_argument("--amplitude", type=float, default=amplitude)
    sub.add_argument("--c3", type=float, default=REFERENCE["c3"])
    sub.add_argument("--c4", type=float, default=REFERENCE["c4"])
    sub.add_argument("--r", type=float, default=REFERENCE["r"])
    sub.add_argument("--kind", choices=("kdv", "mkdv_plus", "mkdv_minus"),
                     default="kdv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stwpa",
        description="SNAIL transmission-line solitons and analogue horizons.",
    )
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    p = subs.add_parser("coeffs", help="flux sweep of the c3/c4 nonlinearities")
    p.add_argument("--alpha", type=float, default=REFERENCE["alpha"])
    p.add_argument("--flux-min", type=float, default=0.0)
    p.add_argument("--flux-max", type=float, default=2.0 * math.pi)
    p.add_argument("--points", type=int, default=401)
    _add_common(p, "coeffs")
    p.set_defaults(handler=_cmd_coeffs)

    p = subs.add_parser("units", help="SI circuit scales and soliton estimates")
    p.add_argument("--cg", type=float, default=REFERENCE["C_g"], help="shunt capacitance (F)")
    p.add_argument("--cj", type=float, default=REFERENCE["C_J"], help="junction capacitance (F)")
    p.add_argument("--ic", type=float, default=REFERENCE["I_c"], help="critical current (A)")
    p.add_argument("--cell", type=float, default=REFERENCE["cell"], help="unit cell length (m)")
    p.add_argument("--alpha-tilde", type=float, default=None,
                   help="quadratic coefficient; derived from --alpha/--flux when omitted")
    p.add_argument("--c3", type=float, default=None,
                   help="cubic nonlinearity; derived from --alpha/--flux when omitted")
    p.add_argument("--alpha", type=float, default=REFERENCE["alpha"])
    p.add_argument("--flux", type=float, default=REFERENCE["flux"])
    p.add_argument("--amplitude", type=float, default=REFERENCE["amplitude"])
    _add_common(p, "units")
    p.set_defaults(handler=_cmd_units)

    p = subs.add_parser("soliton", help="analytic soliton profile CSV (t = 0)")
    _add_line_flags(p)
    p.add_argument("--cells", type=int, default=400)
    p.add_argument("--center", type=float, default=150.0)
    p.add_argument("--direction", type=int, choices=(1, -1), default=1)
    p.add_argument("--si", action="store_true",
                   help="add SI columns (reference circuit parameters)")
    _add_common(p, "soliton")
    p.set_defaults(handler=_cmd_soliton)

    p = subs.add_parser("simulate", help="integrate the discrete line")
    _add_line_flags(p)
    p.add_argument("--pulse", choices=("soliton", "gaussian"), default="soliton")
    p.add_argument("--gaussian-sigma", type=float, default=10.0)
    p.add_argument("--cells", type=int, default=400)
    p.add_argument("--center", type=float, default=100.0)
    p.add_argument("--direction", type=int, choices=(1, -1), default=1)
    p.add_argument("--t-end", type=float, default=200.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--stride", type=int, default=100)
    p.add_argument("--boundary", choices=("fixed", "periodic"), default="fixed")
    p.add_argument("--binary", action="store_true",
                   help="also write the compact binary trajectory container")
    p.add_argument("--si", action="store_true",
                   help="add an SI observables block to the report "
                        "(reference circuit parameters)")
    _add_common(p, "simulate")
    p.set_defaults(handler=_cmd_simulate)

    p = subs.add_parser("collide", help="two-soliton collision run")
    p.add_argument("--amp-right", type=float, default=REFERENCE["amp_right"])
    p.add_argument("--amp-left", type=float, default=REFERENCE["amp_left"])
    p.add_argument("--center-right", type=float, default=REFERENCE["center_right"])
    p.add_argument("--center-left", type=float, default=REFERENCE["center_left"])
    p.add_argument("--c3", type=float, default=REFERENCE["c3"])
    p.add_argument("--c4", type=float, default=REFERENCE["c4"])
    p.add_argument("--r", type=float, default=REFERENCE["r"])
    p.add_argument("--cells", type=int, default=300)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--stride", type=int, default=100)
    p.add_argument("--separation-halfwidths", type=float, default=4.0)
    p.add_argument("--max-t", type=float, default=400.0)
    p.add_argument("--paper", action="store_true",
                   help="force the reference collision scenario")
    _add_common(p, "collide")
    p.set_defaults(handler=_cmd_collide)

    p = subs.add_parser("horizons", help="probe velocity profile and horizon pair")
    _add_line_flags(p)
    p.add_argument("--span", type=float, default=6.0,
                   help="scan range in soliton half-widths")
    p.add_argument("--points", type=int, default=2001)
    p.add_argument("--si", action="store_true",
                   help="attach SI scales (reference circuit parameters)")
    _add_common(p, "horizons")
    p.set_defaults(handler=_cmd_horizons)

    p = subs.add_parser("probe", help="linearized probe packet on a soliton")
    _add_line_flags(p)
    p.add_argument("--cells", type=int, default=768)
    p.add_argument("--center", type=float, default=120.0)
    p.add_argument("--probe-eta", type=float, default=0.0,
                   help="initial packet center relative to the soliton (cells)")
    p.add_argument("--sigma", type=float, default=5.0)
    p.add_argument("--probe-amplitude", type=float, default=1e-4)
    p.add_argument("--steps", type=int, default=4000)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--stride", type=int, default=50)
    _add_common(p, "probe")
    p.set_defaults(handler=_cmd_probe)

    p = subs.add_parser("predict", help="inverse-scattering soliton content")
    p.add_argument("--shape", choices=("sech2", "gaussian"), default="sech2")
    p.add_argument("--amplitude", type=float, default=0.06)
    p.add_argument("--width", type=float, default=None,
                   help="pulse width 1/k in cells (default: matched to amplitude/3)")
    p.add_argument("--c3", type=float, default=REFERENCE["c3"])
    p.add_argument("--c4", type=float, default=REFERENCE["c4"])
    p.add_argument("--r", type=float, default=REFERENCE["r"])
    p.add_argument("--points", type=int, default=4001)
    p.add_argument("--pulse-csv", default=None, metavar="CSV",
                   help="read the pulse from a CSV with x,phi columns instead")
    p.add_argument("--validate", action="store_true",
                   help="cross-check on the lattice (slow for weak pulses)")
    p.add_argument("--separation-halfwidths", type=float, default=3.0)
    p.add_argument("--dt", type=float, default=0.2)
    _add_common(p, "predict")
    p.set_defaults(handler=_cmd_predict)

    p = subs.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("manifest", metavar="MANIFEST_JSON")
    p.add_argument("--out-dir", default=None, metavar="DIR")
    p.set_defaults(handler=_cmd_replay)

    return parser


# ----------------------------------------------------------------------
# output plumbing
# ----------------------------------------------------------------------

def _out_dir(args) -> Path:
    root = args.out_dir or os.environ.get("STWPA_OUT_DIR") or "."
    path = Path(root)
    path.mkdir(parents=True, exist_ok=True)
    return path


_NON_PARAMETER_DESTS = {"handler", "subcommand", "out", "out_dir", "no_plot", "sweep"}


def _parameters(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in _NON_PARAMETER_DESTS}


def _finish(args, outputs: dict, inputs: dict | None = None) -> dict:
    manifest = build_manifest(args.subcommand, _parameters(args),
                              inputs=inputs,
                              outputs={**outputs, "basename": args.out,
                                       "directory": str(_out_dir(args))})
    write_manifest(_out_dir(args) / f"{args.out}.manifest.json", manifest)
    return manifest


def _digest_for(args) -> str:
    return manifest_digest(build_manifest(args.subcommand, _parameters(args)))


def _write_csv(path: Path, columns: list[str], rows, digest: str,
               comments: list[str] | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# stwpa {__version__}\n")
        for line in comments or []:
            fh.write(f"# {line}\n")
        fh.write(f"# manifest_digest: {digest}\n")
        fh.write(f"# columns: {','.join(columns)}\n")
        for row in rows:
            fh.write(",".join(_csv_cell(v) for v in row) + "\n")


def _csv_cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _jsonable(obj):
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    return obj


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_sweep(args) -> int:
    spec = args.sweep
    flag, _, raw = spec.partition("=")
    dest = flag.lstrip("-").replace("-", "_")
    if not raw or dest not in vars(args):
        raise SystemExit(f"bad --sweep spec {spec!r}: use FLAG=V1,V2,...")
    values = [float(v) for v in raw.split(",") if v]
    base_dir = _out_dir(args)

    def one(value: float) -> int:
        ns = argparse.Namespace(**vars(args))
        setattr(ns, dest, value)
        ns.sweep = None
        ns.out_dir = str(base_dir / f"{args.out}_sweep" / f"{dest}={value:g}")
        return main_dispatch(ns)

    with ThreadPoolExecutor() as pool:
        codes = list(pool.map(one, values))
    return max(codes) if codes else 0


def main_dispatch(ns: argparse.Namespace) -> int:
    try:
        return ns.handler(ns)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def _line(args) -> LineParams:
    return LineParams(r=args.r, c3=args.c3, c4=args.c4)


def _reference_scales():
    return derive_scales(REFERENCE["C_g"], REFERENCE["C_J"], REFERENCE["I_c"],
                         REFERENCE["cell"], REFERENCE["alpha_tilde"])


# ----------------------------------------------------------------------
# handlers
# ----------------------------------------------------------------------

def _cmd_coeffs(args) -> int:
    if args.points < 1:
        raise ValueError(f"--points must be >= 1, got {args.points}")
    grid = np.linspace(args.flux_min, args.flux_max, args.points)
    rows = flux_sweep(args.alpha, grid)
    out = _out_dir(args) / f"{args.out}.csv"
    digest = _digest_for(args)
    _write_csv(out, ["phi_ext", "phi_star", "alpha_tilde", "c3", "c4", "ok"],
               [(r.phi_ext, r.phi_star, r.alpha_tilde, r.c3, r.c4, r.ok) for r in rows],
               digest, [f"alpha={args.alpha!r}"])
    outputs = {"csv": str(out)}
    if not args.no_plot:
        from .plotting import flux_sweep_figure, save_figure
        ok = [r for r in rows if r.ok]
        fig = flux_sweep_figure([r.phi_ext for r in ok], [r.c3 for r in ok],
                                [r.c4 for r in ok])
        png = _out_dir(args) / f"{args.out}.png"
        save_figure(fig, png)
        outputs["figure"] = str(png)
    _finish(args, outputs)
    failed = sum(1 for r in rows if not r.ok)
    print(f"coeffs: {len(rows)} flux points -> {out}"
          + (f" ({failed} without a minimum)" if failed else ""))
    return 0


def _cmd_units(args) -> int:
    derived = {}
    alpha_tilde, c3 = args.alpha_tilde, args.c3
    if alpha_tilde is None or c3 is None:
        tc = taylor_coefficients(SnailParams(args.alpha, args.flux))
        alpha_tilde = tc.alpha_tilde if alpha_tilde is None else alpha_tilde
        c3 = tc.c3 if c3 is None else c3
        derived = {"phi_star": tc.phi_star, "c4": tc.c4,
                   "from": {"alpha": args.alpha, "flux": args.flux}}
    scales = derive_scales(args.cg, args.cj, args.ic, args.cell, alpha_tilde)
    obs = soliton_observables(args.amplitude, c3, scales)
    payload = {
        "scales": {
            "C_g_F": scales.C_g, "C_J_F": scales.C_J, "I_c_A": scales.I_c,
            "a_m": scales.a, "alpha_tilde": scales.alpha_tilde,
            "L0_H": scales.L0, "omega0_rad_s": scales.omega0,
            "v0_m_s": scales.v0, "r": scales.r,
        },
        "soliton": {
            "amplitude": args.amplitude, "c3": c3,
            "v_s_m_s": obs.v_s, "V_peak_V": obs.V_peak,
            "half_width_m": obs.half_width_m,
            "half_width_cells": obs.half_width_m / scales.a,
            "delta_t_s": obs.delta_t,
        },
        "flux_derivation": derived,
    }
    out = _out_dir(args) / f"{args.out}.json"
    _write_json(out, payload)
    _finish(args, {"json": str(out)})
    print(f"units: V_peak = {obs.V_peak * 1e6:.3f} uV, "
          f"delta_t = {obs.delta_t * 1e9:.3f} ns -> {out}")
    return 0


def _soliton_spec(args, center: float | None = None, direction: int | None = None,
                  amplitude: float | None = None) -> SolitonSpec:
    return SolitonSpec(
        kind=args.kind,
        amplitude=args.amplitude if amplitude is None else amplitude,
        line=_line(args),
        x0=args.center if center is None else center,
        direction=getattr(args, "direction", 1) if direction is None else direction,
    )


def _cmd_soliton(args) -> int:
    spec = _soliton_spec(args)
    n = np.arange(args.cells, dtype=float)
    phi, phi_dot = profile(spec, n, 0.0)
    out = _out_dir(args) / f"{args.out}.csv"
    digest = _digest_for(args)
    columns = ["n", "x", "phi", "phi_dot"]
    rows = [n.astype(int), n * spec.line.a, phi, phi_dot]
    comments = [f"kind={spec.kind} A={spec.amplitude!r} v_s/v0={soliton_velocity(spec)!r}",
                "x = a*n; phi_dot is d(phi)/d(t_bar)"]
    if args.si:
        scales = _reference_scales()
        columns += ["x_m", "phi_dot_per_s"]
        rows += [scales.meters(n), phi_dot * scales.omega0]
        comments.append(f"SI columns use a={scales.a!r} m, omega0={scales.omega0!r} rad/s")
    _write_csv(out, columns, zip(*rows), digest, comments)
    outputs = {"csv": str(out)}
    if not args.no_plot:
        from .plotting import profile_figure, save_figure
        png = _out_dir(args) / f"{args.out}.png"
        save_figure(profile_figure(n, phi, phi_dot), png)
        outputs["figure"] = str(png)
    _finish(args, outputs)
    print(f"soliton: {args.cells} cells -> {out}")
    return 0


def _cmd_simulate(args) -> int:
    cfg = LatticeConfig(n_cells=args.cells, r=args.r, c3=args.c3, c4=args.c4,
                        boundary=args.boundary, dt_bar=args.dt)
    if args.pulse == "soliton":
        spec = _soliton_spec(args)
        state = seed_initial_state([spec], cfg)
    else:
        # Standing Gaussian: splits into two counter-propagating halves that
        # disperse, so the interpolated peak decays strictly.
        n = np.arange(args.cells, dtype=float)
        phi = args.amplitude * np.exp(-0.5 * ((n - args.center) / args.gaussian_sigma) ** 2)
        state = LatticeState(0.0, phi, np.zeros(args.cells))
        spec = None
    traj = run(state, cfg, args.t_end, record_stride=args.stride)

    report: dict = {"t_end": traj.t_bar[-1], "snapshots": len(traj)}
    if spec is not None:
        window = (4, args.cells - 4)
        m = measure_soliton(traj, window)
        report["measurement"] = {
            "amplitude": m.amplitude,
            "halfwidth_cells": m.halfwidth_cells,
            "fwhm_cells": m.fwhm_cells,
            "v_over_v0": m.velocity,
        }
        report["analytic"] = {
            "amplitude": spec.amplitude,
            "halfwidth_cells": half_width(spec),
            "v_s_over_v0": soliton_velocity(spec),
        }
        report["shape_deviation_over_A"] = shape_deviation(traj, spec) / abs(spec.amplitude)
        if args.si and args.kind == "kdv":
            scales = _reference_scales()
            obs = soliton_observables(m.amplitude, args.c3, scales)
            report["si"] = {
                "V_peak_V": obs.V_peak,
                "half_width_m": obs.half_width_m,
                "delta_t_s": obs.delta_t,
                "v_s_m_s": obs.v_s,
            }
    else:
        peaks = _interpolated_peaks(traj)
        report["peak_series"] = peaks
        report["dispersive"] = bool(np.all(np.diff(peaks) < 0.0))

    out_csv = _out_dir(args) / f"{args.out}.csv"
    digest = _digest_for(args)
    traj.to_csv(out_csv, comments=[f"manifest_digest: {digest}"])
    out_json = _out_dir(args) / f"{args.out}.json"
    _write_json(out_json, report)
    outputs = {"csv": str(out_csv), "json": str(out_json)}
    if args.binary:
        out_bin = _out_dir(args) / f"{args.out}.stwpa"
        traj.write_binary(out_bin)
        outputs["binary"] = str(out_bin)
    if not args.no_plot:
        from .plotting import save_figure, trajectory_figure
        png = _out_dir(args) / f"{args.out}.png"
        save_figure(trajectory_figure(traj), png)
        outputs["figure"] = str(png)
    _finish(args, outputs)
    print(f"simulate: {len(traj)} snapshots -> {out_csv}")
    return 0


def _interpolated_peaks(traj: Trajectory) -> np.ndarray:
    """Parabola-interpolated max |phi| per snapshot (removes the subcell
    sampling wobble of the raw grid maximum)."""
    out = np.empty(len(traj))
    for i, row in enumerate(traj.phi):
        y = np.abs(row)
        j = int(np.argmax(y))
        if j == 0 or j == y.size - 1:
            out[i] = y[j]
            continue
        denom = y[j - 1] - 2.0 * y[j] + y[j + 1]
        delta = 0.5 * (y[j - 1] - y[j + 1]) / denom if denom != 0.0 else 0.0
        out[i] = y[j] - 0.25 * (y[j - 1] - y[j + 1]) * delta
    return out


def _cmd_collide(args) -> int:
    if args.paper:
        for dest, key in (("amp_right", "amp_right"), ("amp_left", "amp_left"),
                          ("center_right", "center_right"),
                          ("center_left", "center_left"),
                          ("c3", "c3"), ("c4", "c4"), ("r", "r")):
            setattr(args, dest, REFERENCE[key])
        args.cells, args.dt = 300, 0.05
    line = LineParams(r=args.r, c3=args.c3, c4=args.c4)
    right = SolitonSpec("kdv", args.amp_right, line, x0=args.center_right, direction=1)
    left = SolitonSpec("kdv", args.amp_left, line, x0=args.center_left, direction=-1)
    cfg = LatticeConfig(n_cells=args.cells, r=args.r, c3=args.c3, c4=args.c4,
                        dt_bar=args.dt)
    state = seed_initial_state([right, left], cfg)

    pre = {
        "right": _single_snapshot_amplitude(state, cfg, right),
        "left": _single_snapshot_amplitude(state, cfg, left),
    }
    min_sep = args.separation_halfwidths * max(half_width(right), half_width(left))
    t_meet = (args.center_left - args.center_right) / (
        soliton_velocity(right) + soliton_velocity(left))

    segments = [run(state, cfg, t_bar_end=max(cfg.dt_bar, t_meet),
                    record_stride=args.stride)]
    state = segments[-1].state(-1)
    separated = False
    while state.t_bar < args.max_t:
        seg = run(state, cfg, t_bar_end=state.t_bar + 10.0, record_stride=args.stride)
        segments.append(seg)
        state = seg.state(-1)
        pos = _two_peak_positions(state.phi, 0.5 * min(args.amp_right, args.amp_left))
        if pos is not None and abs(pos[1] - pos[0]) >= min_sep:
            separated = True
            break
    traj = _concat(segments)
    if not separated:
        raise SimulationError(
            f"solitons did not separate by {min_sep:.1f} cells before t={args.max_t}"
        )

    pos = _two_peak_positions(state.phi, 0.5 * min(args.amp_right, args.amp_left))
    mid = int(0.5 * (pos[0] + pos[1]))
    post_left = _window_amplitude(state, (4, mid))
    post_right = _window_amplitude(state, (mid, args.cells - 4))
    report = {
        "pre": pre,
        "post": {"right": post_right, "left": post_left},
        "relative_change": {
            "right": (post_right - pre["right"]) / pre["right"],
            "left": (post_left - pre["left"]) / pre["left"],
        },
        "t_separated": state.t_bar,
        "separation_cells": abs(pos[1] - pos[0]),
    }
    out_csv = _out_dir(args) / f"{args.out}.csv"
    digest = _digest_for(args)
    traj.to_csv(out_csv, comments=[f"manifest_digest: {digest}"])
    out_json = _out_dir(args) / f"{args.out}.json"
    _write_json(out_json, report)
    outputs = {"csv": str(out_csv), "json": str(out_json)}
    if not args.no_plot:
        from .plotting import save_figure, trajectory_figure
        png = _out_dir(args) / f"{args.out}.png"
        save_figure(trajectory_figure(traj), png)
        outputs["figure"] = str(png)
    _finish(args, outputs)
    print(f"collide: post-collision amplitudes right={post_right:.4f}, "
          f"left={post_left:.4f} at t_bar={state.t_bar:g} -> {out_json}")
    return 0


def _single_snapshot_amplitude(state: LatticeState, cfg: LatticeConfig,
                               spec: SolitonSpec) -> float:
    lo = max(4, int(spec.x0 - 2.5 * half_width(spec)))
    hi = min(cfg.n_cells - 4, int(spec.x0 + 2.5 * half_width(spec)))
    return _window_amplitude(state, (lo, hi))


def _window_amplitude(state: LatticeState, window: tuple[int, int]) -> float:
    from .lattice import _peak_in_window

    return _peak_in_window(state.phi, window[0], window[1])[2]


def _two_peak_positions(phi: np.ndarray, floor: float):
    from scipy.signal import find_peaks

    peaks, _ = find_peaks(phi, height=floor)
    if peaks.size < 2:
        return None
    order = np.argsort(phi[peaks])[::-1][:2]
    sel = np.sort(peaks[order])
    return float(sel[0]), float(sel[1])


def _concat(segments: list[Trajectory]) -> Trajectory:
    t = [segments[0].t_bar]
    phi = [segments[0].phi]
    dot = [segments[0].phi_dot]
    for seg in segments[1:]:
        t.append(seg.t_bar[1:])
        phi.append(seg.phi[1:])
        dot.append(seg.phi_dot[1:])
    return Trajectory(segments[0].config, np.concatenate(t),
                      np.concatenate(phi), np.concatenate(dot))


def _cmd_horizons(args) -> int:
    line = _line(args)
    if args.si:
        line = _reference_scales().line(args.c3, args.c4)
    spec = SolitonSpec(args.kind, args.amplitude, line, x0=0.0, direction=1)
    report = find_horizons(spec, span=args.span)
    prof = velocity_profile(spec)
    w = half_width(spec)
    eta = np.linspace(-args.span * w, args.span * w, args.points)
    v = prof.velocity(eta)
    payload = {
        "v_s": report.v_s,
        "v0": line.v0,
        "horizons": [
            {"eta": h.eta, "eta_over_a": h.eta / line.a, "kind": h.kind,
             "kappa": h.kappa, "hawking_temperature": h.hawking_temperature}
            for h in report.horizons
        ],
        "regions": {
            "I": ["-inf", report.eta_black / line.a],
            "II": [report.eta_black / line.a, report.eta_white / line.a],
            "III": [report.eta_white / line.a, "+inf"],
        },
        "note": report.note,
        "si": bool(args.si),
    }
    out_json = _out_dir(args) / f"{args.out}.json"
    _write_json(out_json, payload)
    digest = _digest_for(args)
    out_csv = _out_dir(args) / f"{args.out}.csv"
    _write_csv(out_csv, ["eta_over_a", "v_over_v0", "region"],
               [(e / line.a, vv / line.v0, report.region_of(e))
                for e, vv in zip(eta, v)],
               digest)
    outputs = {"json": str(out_json), "csv": str(out_csv)}
    if not args.no_plot:
        from .plotting import save_figure, velocity_profile_figure
        png = _out_dir(args) / f"{args.out}.png"
        fig = velocity_profile_figure(eta / line.a, v / line.v0,
                                      report.v_s / line.v0,
                                      report.eta_black / line.a,
                                      report.eta_white / line.a)
        save_figure(fig, png)
        outputs["figure"] = str(png)
    _finish(args, outputs)
    print(f"horizons: black at eta/a={report.eta_black / line.a:+.3f}, "
          f"white at eta/a={report.eta_white / line.a:+.3f} -> {out_json}")
    return 0


def _cmd_probe(args) -> int:
    spec = _soliton_spec(args)
    cfg = LatticeConfig(n_cells=args.cells, r=args.r, c3=args.c3, c4=args.c4,
                        dt_bar=args.dt)
    report = find_horizons(spec)
    v_s = soliton_velocity(spec)

    n = np.arange(args.cells, dtype=float)
    nc = args.center + args.probe_eta
    envelope = args.probe_amplitude * np.exp(-0.5 * ((n - nc) / args.sigma) ** 2)
    background0 = profile(spec, n, 0.0)[0]
    local_v = np.sqrt(1.0 + args.c3 * background0 + 0.5 * args.c4 * background0**2)
    denv = -(n - nc) / args.sigma**2 * envelope
    probe0 = LatticeState(0.0, envelope, -local_v * denv)

    traj = run_probe(spec, probe0, cfg, t_bar_end=args.steps * args.dt,
                     record_stride=args.stride)

    weights = traj.phi**2
    centroid = np.sum(weights * np.arange(args.cells), axis=1) / np.sum(weights, axis=1)
    eta = centroid - (args.center + v_s * traj.t_bar)
    regions = [report.region_of(e) for e in eta]
    events = [
        {"t_bar": float(traj.t_bar[i]), "from": regions[i - 1], "to": regions[i]}
        for i in range(1, len(regions)) if regions[i] != regions[i - 1]
    ]

    digest = _digest_for(args)
    out_csv = _out_dir(args) / f"{args.out}.csv"
    traj.to_csv(out_csv, comments=[f"manifest_digest: {digest}"])
    audit_csv = _out_dir(args) / f"{args.out}_audit.csv"
    _write_csv(audit_csv, ["t_bar", "centroid_cells", "eta_over_a", "region"],
               zip(traj.t_bar, centroid, eta, regions), digest)
    out_json = _out_dir(args) / f"{args.out}.json"
    _write_json(out_json, {
        "eta_black": report.eta_black, "eta_white": report.eta_white,
        "initial_region": regions[0], "final_region": regions[-1],
        "eta_min": float(np.min(eta)), "eta_max": float(np.max(eta)),
        "crossing_events": events,
        "probe_background_ratio": traj.meta["probe_background_ratio"],
    })
    outputs = {"csv": str(out_csv), "audit_csv": str(audit_csv), "json": str(out_json)}
    if not args.no_plot:
        from .plotting import probe_audit_figure, save_figure
        png = _out_dir(args) / f"{args.out}.png"
        save_figure(probe_audit_figure(traj.t_bar, eta, report.eta_black,
                                       report.eta_white), png)
        outputs["figure"] = str(png)
    _finish(args, outputs)
    print(f"probe: region {regions[0]} -> {regions[-1]}, "
          f"{len(events)} crossing events -> {audit_csv}")
    return 0


def _load_pulse_csv(path):
    """Read (x, phi) from a CSV; honors a '# columns:' comment so profile
    files written by the `soliton` subcommand load directly."""
    cols = None
    with open(path, "r", encoding="utf-8") as fh:
        for text in fh:
            if text.startswith("#") and "columns:" in text:
                cols = [c.strip() for c in text.split("columns:", 1)[1].split(",")]
            elif not text.startswith("#"):
                break
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if cols and "phi" in cols:
        xi = cols.index("x") if "x" in cols else (cols.index("n") if "n" in cols else 0)
        return data[:, xi], data[:, cols.index("phi")]
    return data[:, 0], data[:, 1]


def _cmd_predict(args) -> int:
    line = _line(args)
    if args.pulse_csv:
        x, phi = _load_pulse_csv(args.pulse_csv)
        dx = float(x[1] - x[0])
        inputs = {"pulse_csv": str(Path(args.pulse_csv))}
    else:
        width = args.width
        if width is None:
            width = 1.0 / np.sqrt(line.c3 * (args.amplitude / 3.0) / (12.0 * line.r))
        extent = 12.0 * width
        x = np.linspace(-extent, extent, args.points)
        if args.shape == "sech2":
            phi = args.amplitude / np.cosh(x / width) ** 2
        else:
            phi = args.amplitude * np.exp(-0.5 * (x / width) ** 2)
        dx = float(x[1] - x[0])
        inputs = None
    report = predict_amplitudes(phi, dx, line)
    payload = {
        "eigenvalues": report.eigenvalues,
        "kappas": report.kappas,
        "predicted_amplitudes": report.predicted_amplitudes,
        "n_solitons": len(report.predicted_amplitudes),
        "dx": report.dx,
        "n_points": report.n_points,
    }
    if args.validate:
        cells = np.arange(math.floor(x[0]), math.ceil(x[-1]) + 1, dtype=float)
        pulse_cells = np.interp(cells, x, phi)
        validation = validate_against_lattice(
            pulse_cells, line, separation_halfwidths=args.separation_halfwidths,
            dt_bar=args.dt)
        payload["lattice_validation"] = {
            "measured_amplitudes": validation.measured_amplitudes,
            "relative_errors": validation.relative_errors,
            "t_bar_end": validation.t_bar_end,
            "n_cells": validation.config.n_cells,
        }
    out_json = _out_dir(args) / f"{args.out}.json"
    _write_json(out_json, payload)
    digest = _digest_for(args)
    out_csv = _out_dir(args) / f"{args.out}.csv"
    scale = line.c3 / (6.0 * line.r * line.a**2)
    _write_csv(out_csv, ["x", "phi", "potential"],
               zip(x, phi, -scale * phi), digest)
    outputs = {"json": str(out_json), "csv": str(out_csv)}
    if not args.no_plot:
        from .plotting import save_figure, spectrum_figure
        png = _out_dir(args) / f"{args.out}.png"
        save_figure(spectrum_figure(x, -scale * phi, report.eigenvalues), png)
        outputs["figure"] = str(png)
    _finish(args, outputs, inputs=inputs)
    amps = ", ".join(f"{a:.4f}" for a in report.predicted_amplitudes)
    print(f"predict: {len(report.predicted_amplitudes)} soliton(s) "
          f"[{amps}] -> {out_json}")
    return 0


def _cmd_replay(args) -> int:
    manifest = load_manifest(args.manifest)
    parser = build_parser()
    sub_actions = next(a for a in parser._actions
                       if isinstance(a, argparse._SubParsersAction))
    template = sub_actions.choices[manifest["subcommand"]].parse_args([])

    ns = argparse.Namespace(**vars(template))
    for key, value in manifest["parameters"].items():
        setattr(ns, key, value)
    ns.subcommand = manifest["subcommand"]
    ns.out = manifest["outputs"].get("basename", manifest["subcommand"])
    ns.out_dir = args.out_dir or manifest["outputs"].get("directory", ".")
    ns.no_plot = True
    ns.sweep = None
    code = main_dispatch(ns)
    if code == 0:
        print(f"replay: reproduced {manifest['subcommand']} into {ns.out_dir}")
    return code


if __name__ == "__main__":
    sys.exit(main())
