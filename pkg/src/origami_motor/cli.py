"""Command-line front end.

Usage:
    kcl design   [--config FILE] [--out DIR]
    kcl model    --V-kV -29 [--omega-max 300] [--steps 301]
    kcl simulate --V-kV -29 --t-on 15 --t-end 30 --out DIR
    kcl fit-load TRACE... --out DIR
    kcl fit-motor TRACE... --load load.json
    kcl pattern  --out DIR
    kcl metrics

Exit codes: 0 success, 2 invalid input or data, 3 fit did not converge.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import corona, dynamics, estimation, geometry, pattern
from .config import ConfigError, load_config
from .errors import DataQualityError, FitError, ParameterError, TraceFormatError
from .metrics import performance_metrics
from .traces import format_table, format_trace, ingest_trace, write_trace

log = logging.getLogger("kcl")

EXIT_OK, EXIT_DATA, EXIT_FIT = 0, 2, 3


def _out_dir(args, cfg) -> Path | None:
    out = args.out or cfg.paths.get("out_dir")
    if out is None:
        return None
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(text: str, out: Path | None, name: str) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        (out / name).write_text(text, encoding="utf-8", newline="\n")
        print(f"wrote {out / name}")


def _require(cfg, *names):
    for name in names:
        if getattr(cfg, name) is None:
            raise ConfigError(f"config has no '{name}' section")


def _load_model(args, cfg) -> dynamics.LoadModel:
    if getattr(args, "load", None):
        data = json.loads(Path(args.load).read_text(encoding="utf-8"))
        return dynamics.LoadModel(data["c0_Nm"], data["c1_Nm_s_per_rad"], data["c2_Nm_s2_per_rad2"])
    load = cfg.load or dynamics.LoadModel()
    overrides = {k: getattr(args, k) for k in ("c0", "c1", "c2") if getattr(args, k, None) is not None}
    return replace(load, **overrides) if overrides else load


def _electrical(args, cfg) -> corona.ElectricalParams:
    _require(cfg, "electrical", "body")
    params = cfg.electrical
    overrides = {}
    if getattr(args, "sigma", None) is not None:
        overrides["sigma"] = args.sigma
    if getattr(args, "alpha", None) is not None:
        overrides["alpha"] = args.alpha
    if getattr(args, "V_onset_kV", None) is not None:
        overrides["V_onset"] = args.V_onset_kV * 1e3
    return replace(params, **overrides) if overrides else params


def cmd_design(args, cfg) -> int:
    specs = [s for s in (cfg.rotor, cfg.stator) if s is not None]
    if not specs:
        raise ConfigError("config has neither 'rotor' nor 'stator'")
    geos = {s.role: geometry.deployed_geometry(s) for s in specs}
    rows = [
        ("a_mm", "side length", lambda g: g.a),
        ("theta_max_deg", "folded polygon angle", lambda g: math.degrees(g.theta_max)),
        ("h_mm", "cell height", lambda g: g.h),
        ("body_height_mm", "body height", lambda g: g.body_height),
        ("circumradius_mm", "circumradius", lambda g: g.circumradius),
    ]
    roles = list(geos)
    print("quantity".ljust(24) + "".join(r.rjust(12) for r in roles))
    for _, label, fn in rows:
        print(label.ljust(24) + "".join(f"{fn(geos[r]):12.4g}" for r in roles))
    if cfg.rotor and cfg.stator:
        nest = geometry.nesting_check(cfg.rotor, cfg.stator)
        print(f"nesting: inscribed gap {nest.inscribed_gap:.4g} mm, circumscribed gap "
              f"{nest.circum_gap:.4g} mm, {'feasible' if nest.feasible else 'INFEASIBLE'}")
    if cfg.heights:
        ratio = geometry.expansion_metrics(cfg.heights["stowed_mm"], cfg.heights["deployed_mm"])
        print(f"expansion ratio: {ratio:.4g} ({geometry.format_ratio(ratio)})")

    out = _out_dir(args, cfg)
    if out is not None:
        lines = ["quantity," + ",".join(roles)]
        for key, _, fn in rows:
            lines.append(key + "," + ",".join(repr(float(fn(geos[r]))) for r in roles))
        (out / "geometry.csv").write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
        print(f"wrote {out / 'geometry.csv'}")
    return EXIT_OK


def cmd_model(args, cfg) -> int:
    params = _electrical(args, cfg)
    body = cfg.body
    V = args.V_kV * 1e3
    table = corona.torque_speed_sweep(params, body, V, (args.omega_min, args.omega_max), args.steps)
    closed = corona.max_torque(params, body, V)
    _, numeric = corona.numeric_max_torque(params, body, V)
    grid_max = float(table[:, 1].max())
    if corona.below_onset(params, V):
        log.warning("|V| = %.4g kV is at or below onset %.4g kV: no corona torque",
                    abs(args.V_kV), abs(params.V_onset) / 1e3)
    comments = {"model": f"corona V_kV={args.V_kV!r} sigma={params.sigma!r} alpha={params.alpha!r} "
                         f"V_onset_kV={params.V_onset / 1e3!r}"}
    _emit(format_table(table, "omega_rad_s,torque_Nm", comments), _out_dir(args, cfg), "torque_speed.csv")
    rel = (closed - numeric) / numeric if numeric else 0.0
    print(f"closed-form max torque {closed:.4g} N m; numeric max {numeric:.4g} N m "
          f"(relative difference {rel:.4g}); table max {grid_max:.4g} N m", file=sys.stderr)
    return EXIT_OK


def cmd_simulate(args, cfg) -> int:
    params = _electrical(args, cfg)
    load = _load_model(args, cfg)
    V = args.V_kV * 1e3
    steps = [(0.0, V)]
    if args.t_on is not None and args.t_on < args.t_end:
        steps.append((args.t_on, 0.0))
    schedule = dynamics.VoltageSchedule(steps)
    trace = dynamics.simulate(params, cfg.body, load, schedule, dt=args.dt, t_end=args.t_end,
                              omega0=args.omega0)
    out = _out_dir(args, cfg)
    name = args.name or f"trace_{args.V_kV:g}kV.csv"
    if out is None:
        sys.stdout.write(format_trace(trace))
    else:
        write_trace(trace, out / name)
        print(f"wrote {out / name}")
    print(f"peak speed {trace.omega.max():.4g} rad/s, final speed {trace.omega[-1]:.4g} rad/s",
          file=sys.stderr)
    return EXIT_OK


def _read_kinematics(paths, window, degree, fps=None):
    kins = []
    for p in paths:
        trace = ingest_trace(p, frame_rate=fps)
        kins.append(estimation.differentiate(trace, window, degree))
    return kins


def cmd_fit_load(args, cfg) -> int:
    _require(cfg, "body")
    kins = _read_kinematics(args.traces, args.window, args.degree, args.fps)
    segments = []
    for kin in kins:
        if "schedule" in kin.metadata:
            segments += estimation.segment_spin_down(kin, omega_floor=args.omega_floor)
        else:
            # a trace without a schedule is taken to be unpowered throughout
            segments += estimation.segment_spin_down(kin, dynamics.VoltageSchedule.constant(0.0),
                                                     omega_floor=args.omega_floor)
    load, report = estimation.fit_load_quadratic(segments, cfg.body.inertia)
    print(f"spin-down segments: {len(segments)}")
    print(report.summary())
    result = {"c0_Nm": load.c0, "c1_Nm_s_per_rad": load.c1, "c2_Nm_s2_per_rad2": load.c2,
              "residual_rms_Nm": report.residual_rms}
    out = _out_dir(args, cfg)
    if out is not None:
        (out / "load.json").write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {out / 'load.json'}")
    return EXIT_OK


def cmd_fit_motor(args, cfg) -> int:
    params = _electrical(args, cfg)
    load = _load_model(args, cfg)
    kins = _read_kinematics(args.traces, args.window, args.degree, args.fps)
    points = []
    for kin in kins:
        for seg in estimation.segment_powered(kin, omega_floor=0.0):
            rows = estimation.motor_torque_from_trace(seg, cfg.body.inertia, load)
            points.append(np.column_stack([rows, np.full(len(rows), seg.metadata["voltage_V"])]))
    if not points:
        raise ParameterError("no powered samples found in the traces")
    fitted, report = estimation.fit_motor_params(np.vstack(points), cfg.body, params)
    print(report.summary())
    result = {"sigma_S_per_m": fitted.sigma, "V_onset_kV": fitted.V_onset / 1e3,
              "alpha_rad": fitted.alpha, "residual_rms_Nm": report.residual_rms,
              "reliable": report.reliable}
    out = _out_dir(args, cfg)
    if out is not None:
        (out / "motor_fit.json").write_text(json.dumps(result, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {out / 'motor_fit.json'}")
    return EXIT_OK


def cmd_pattern(args, cfg) -> int:
    specs = [s for s in (cfg.rotor, cfg.stator) if s is not None]
    if not specs:
        raise ConfigError("config has neither 'rotor' nor 'stator'")
    out = _out_dir(args, cfg) or Path(".")
    for spec in specs:
        pat = pattern.build_pattern(spec, args.chirality, strip_width=args.strip_width,
                                    pad_inset=args.pad_inset)
        svg = out / f"{spec.role}.svg"
        svg.write_text(pattern.emit_svg(pat), encoding="utf-8", newline="\n")
        print(f"wrote {svg}")
        if args.creases_csv:
            csv = out / f"{spec.role}_creases.csv"
            csv.write_text(pattern.crease_table(pat), encoding="utf-8", newline="\n")
            print(f"wrote {csv}")
    return EXIT_OK


def cmd_metrics(args, cfg) -> int:
    if not cfg.heights:
        raise ConfigError("config has no 'heights' section")
    for key in ("stowed_mm", "deployed_mm"):
        if key not in cfg.heights:
            raise ConfigError(f"heights: missing {key}")
    report = performance_metrics(cfg.measured, cfg.heights["stowed_mm"], cfg.heights["deployed_mm"])
    print("\n".join(report.lines()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kcl", description="Kresling corona motor design and analysis")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="project JSON (default: bundled prototype values)")
        sp.add_argument("--out", help="output directory")
        return sp

    def electrical(sp):
        sp.add_argument("--sigma", type=float, help="gap conductivity override, S/m")
        sp.add_argument("--alpha", type=float, help="discharge offset override, rad")
        sp.add_argument("--V-onset-kV", dest="V_onset_kV", type=float, help="onset voltage override, kV")

    def load(sp):
        sp.add_argument("--load", help="load JSON written by fit-load")
        for name in ("c0", "c1", "c2"):
            sp.add_argument(f"--{name}", type=float, help=f"load coefficient {name} override")

    def smoothing(sp):
        sp.add_argument("--window", type=int, default=estimation.DEFAULT_WINDOW)
        sp.add_argument("--degree", type=int, default=estimation.DEFAULT_DEGREE)
        sp.add_argument("--fps", type=float, help="frame rate for frame-indexed traces")

    sp = common(sub.add_parser("design", help="fold geometry report"))
    sp.set_defaults(func=cmd_design)

    sp = common(sub.add_parser("model", help="torque-speed table"))
    electrical(sp)
    sp.add_argument("--V-kV", dest="V_kV", type=float, default=-29.0)
    sp.add_argument("--omega-min", type=float, default=0.0)
    sp.add_argument("--omega-max", type=float, default=300.0)
    sp.add_argument("--steps", type=int, default=301)
    sp.set_defaults(func=cmd_model)

    sp = common(sub.add_parser("simulate", help="speed-up / spin-down trace"))
    electrical(sp)
    load(sp)
    sp.add_argument("--V-kV", dest="V_kV", type=float, default=-29.0)
    sp.add_argument("--t-on", type=float, default=None, help="power-off time, s")
    sp.add_argument("--t-end", type=float, default=10.0)
    sp.add_argument("--dt", type=float, default=dynamics.DEFAULT_DT)
    sp.add_argument("--omega0", type=float, default=0.0)
    sp.add_argument("--name", help="output file name")
    sp.set_defaults(func=cmd_simulate)

    sp = common(sub.add_parser("fit-load", help="fit load curve to spin-down traces"))
    sp.add_argument("traces", nargs="+")
    sp.add_argument("--omega-floor", type=float, default=estimation.OMEGA_FLOOR)
    smoothing(sp)
    sp.set_defaults(func=cmd_fit_load)

    sp = common(sub.add_parser("fit-motor", help="identify sigma, V_onset, alpha"))
    sp.add_argument("traces", nargs="+")
    electrical(sp)
    load(sp)
    smoothing(sp)
    sp.set_defaults(func=cmd_fit_motor)

    sp = common(sub.add_parser("pattern", help="write crease-pattern SVGs"))
    sp.add_argument("--chirality", choices=("right", "left"), default="right")
    sp.add_argument("--strip-width", type=float, default=1.5)
    sp.add_argument("--pad-inset", type=float, default=1.0)
    sp.add_argument("--creases-csv", action="store_true")
    sp.set_defaults(func=cmd_pattern)

    sp = common(sub.add_parser("metrics", help="torque density report"))
    sp.set_defaults(func=cmd_metrics)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except FitError as exc:
        log.error("fit failed: %s", exc)
        if exc.report is not None:
            log.error("best so far:\n%s", exc.report.summary())
        return EXIT_FIT
    except (ParameterError, TraceFormatError, DataQualityError, KeyError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
