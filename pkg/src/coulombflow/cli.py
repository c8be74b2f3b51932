"""Batch command-line interface.

Subcommands: simulate (one integration run, CSV/SVG artifacts), fronts
(analytic front ODE systems), verify (named check suites, JSON report),
plot (CSV columns to an SVG line chart).  Exit codes: 0 success, 1
verification failure, 2 usage or configuration error.  COULOMBFLOW_THREADS
caps suite parallelism (default 1, bit-deterministic).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from coulombflow.config import ConfigError, load_config
from coulombflow.csvio import read_csv, write_csv
from coulombflow.hj_fronts import (
    SingleVortexState,
    SupersolutionState,
    TwoVortexState,
    integrate_single_vortex,
    integrate_supersolution,
    integrate_two_vortex,
)
from coulombflow.initial_conditions import build_initial_condition
from coulombflow.pde_solver import SolverConfig, SolverError, run
from coulombflow.rearrangement import rearrange, support_measure
from coulombflow.suites import run_suite
from coulombflow.svgplot import write_line_chart
from coulombflow.torus_field import make_grid
from coulombflow.verify import emit_report

__all__ = ["main"]


def _default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("COULOMBFLOW_THREADS", "1")))
    except ValueError:
        return 1


def _ensure_outdir(path: str) -> None:
    try:
        os.makedirs(path, exist_ok=True)
        probe = os.path.join(path, ".write_probe")
        with open(probe, "w") as fh:
            fh.write("")
        os.remove(probe)
    except OSError as exc:
        raise ConfigError(f"output directory {path!r} is not writable: {exc}") from exc


def _resolve_mollify(ic_params: dict, grid) -> float:
    mol = ic_params.get("mollify", None)
    if mol == "off":
        return 0.0
    if mol is not None:
        return float(mol)
    # indicator data gets a two-cell mollifier unless explicitly disabled
    return 2.0 * grid.h if ic_params.get("kind") == "blocks" else 0.0


def _t_tag(t: float) -> str:
    return f"{t:.6f}"


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    if not cfg.grid or not cfg.solver or not cfg.initial_condition:
        raise ConfigError("simulate needs grid, solver and initial_condition sections")
    out_dir = args.out or cfg.outputs.get("dir", "out")
    _ensure_outdir(out_dir)
    formats = cfg.outputs.get("formats", ["csv"])

    grid = make_grid(cfg.grid["dim"], cfg.grid["n"])
    u0 = build_initial_condition(grid, cfg.initial_condition)
    solver_cfg = SolverConfig(
        m=cfg.solver["m"],
        epsilon=cfg.solver.get("epsilon", "auto"),
        cfl=cfg.solver.get("cfl", 0.45),
        t_end=cfg.solver.get("t_end", 1.0),
        output_times=cfg.solver.get("output_times", []),
        floor_m_lt_1=cfg.solver.get("floor_m_lt_1", 0.0),
        mollify_width=_resolve_mollify(cfg.initial_condition, grid),
        record_every=cfg.solver.get("record_every", 1),
    )
    traj = run(u0, solver_cfg)

    obs = traj.observables
    write_csv(
        os.path.join(out_dir, "observables.csv"),
        ["t", "mass", "min", "max", "l1", "l2", "linf", "energy", "dissipation", "grad_sup"],
        [
            obs.t,
            obs.mass,
            obs.min,
            obs.max,
            obs.lp[1],
            obs.lp[2],
            obs.lp[np.inf],
            obs.energy,
            obs.cumulative_dissipation,
            obs.grad_sup,
        ],
    )
    theta = 1e-8 * float(np.max(traj.snapshots[0][1].values))
    support_rows = []
    for t, f in traj.snapshots:
        tag = _t_tag(t)
        if grid.dim == 1:
            write_csv(
                os.path.join(out_dir, f"u_{tag}.csv"),
                ["x", "value"],
                [grid.axis_coordinates(), f.values],
            )
        else:
            x1, x2 = grid.coordinates()
            write_csv(
                os.path.join(out_dir, f"u_{tag}.csv"),
                ["x1", "x2", "value"],
                [x1.ravel(), x2.ravel(), f.values.ravel()],
            )
        prof = rearrange(f)
        write_csv(
            os.path.join(out_dir, f"k_{tag}.csv"),
            ["s", "u_star", "k"],
            [prof.s_midpoints, prof.u_star, prof.k_at_midpoints()],
        )
        support_rows.append((t, support_measure(f, theta)))
    write_csv(
        os.path.join(out_dir, "support.csv"),
        ["t", "S"],
        [np.array([r[0] for r in support_rows]), np.array([r[1] for r in support_rows])],
    )
    with open(os.path.join(out_dir, "run_meta.json"), "w") as fh:
        json.dump(
            {
                "config": cfg.raw,
                "epsilon_resolved": traj.epsilon,
                "theta_support": theta,
                "mollify_width": solver_cfg.mollify_width,
            },
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    if "svg" in formats:
        write_line_chart(
            os.path.join(out_dir, "observables.svg"),
            obs.t,
            {"energy": obs.energy, "max": obs.max, "min": obs.min},
            xlabel="t",
            ylabel="value",
            title="run observables",
        )
        sup = np.array([r[1] for r in support_rows])
        write_line_chart(
            os.path.join(out_dir, "support.svg"),
            np.array([r[0] for r in support_rows]),
            {"S": sup},
            xlabel="t",
            ylabel="support measure",
            title="support vs time",
        )
    return 0


def cmd_fronts(args) -> int:
    cfg = load_config(args.config)
    fr = dict(cfg.fronts)
    if not fr:
        raise ConfigError("fronts section missing from config")
    mode = args.mode
    t_end = fr.get("t_end", 1.0)
    try:
        if mode == "single":
            state = SingleVortexState(fr["s1"], fr["s2"], fr["ubar"], fr["m"])
            traj = integrate_single_vortex(state, t_end)
            labels = ["s1", "s2"]
        elif mode == "double":
            state = TwoVortexState(
                fr["s1"], fr["s2"], fr["s3"], fr["s4"], fr["alpha"], fr["ubar"], fr["m"]
            )
            traj = integrate_two_vortex(state, t_end)
            labels = ["s1", "s2", "s3", "s4"]
        elif mode == "super":
            state = SupersolutionState(
                C=fr["C"], alpha=fr["alpha"], s2=fr["s2"], s3=fr["s3"],
                ubar=fr["ubar"], m=fr["m"],
            )
            traj = integrate_supersolution(state, t_end)
            labels = ["s2", "s3"]
        else:
            raise ConfigError(f"unknown fronts mode {mode!r}")
    except KeyError as exc:
        raise ConfigError(f"fronts config is missing key {exc}") from exc
    except ValueError as exc:
        raise ConfigError(f"front hypothesis violated: {exc}") from exc

    out_dir = args.out or cfg.outputs.get("dir", "out")
    _ensure_outdir(out_dir)
    stride = max(1, len(traj.times) // 2000)
    idx = list(range(0, len(traj.times), stride))
    if idx[-1] != len(traj.times) - 1:
        idx.append(len(traj.times) - 1)
    ts = traj.times[idx]
    cols = [ts] + [traj.positions[idx, j] for j in range(traj.positions.shape[1])]
    if mode == "super":
        flag = (ts >= traj.t_star).astype(int) if math.isfinite(traj.t_star) else np.zeros(len(ts), dtype=int)
    else:
        flag = (
            (ts >= traj.halted_at).astype(int)
            if traj.halted_at is not None
            else np.zeros(len(ts), dtype=int)
        )
    cols.append(flag)
    write_csv(os.path.join(out_dir, "fronts.csv"), ["t"] + labels + ["t_star_flag"], cols)
    if "svg" in cfg.outputs.get("formats", ["csv"]):
        write_line_chart(
            os.path.join(out_dir, "fronts.svg"),
            ts,
            {lab: traj.positions[idx, j] for j, lab in enumerate(labels)},
            xlabel="t",
            ylabel="front position",
            title=f"{mode} front tracking",
        )
    return 0


def cmd_verify(args) -> int:
    cfg = load_config(args.config)
    suite = cfg.verify.get("suite")
    if not suite:
        raise ConfigError("verify.suite is required")
    n = cfg.verify.get("n", 128)
    jobs = args.jobs or _default_jobs()
    out_dir = args.out or cfg.outputs.get("dir", "out")
    _ensure_outdir(out_dir)
    try:
        results, warnings = run_suite(suite, n=n, jobs=jobs)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    code = emit_report(
        results, os.path.join(out_dir, "report.json"), config=cfg.raw, warnings=warnings
    )
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    print(
        f"{suite}: {sum(r.status == 'pass' for r in results)} pass, "
        f"{sum(r.status == 'fail' for r in results)} fail, "
        f"{sum(r.status == 'inconclusive' for r in results)} inconclusive"
    )
    return code


def cmd_plot(args) -> int:
    try:
        header, cols = read_csv(getattr(args, "in"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot plot: {exc}") from exc
    x_name = args.x
    y_names = [c.strip() for c in args.y.split(",") if c.strip()]
    for name in [x_name] + y_names:
        if name not in cols:
            raise ConfigError(f"column {name!r} not in CSV (has {header})")
    write_line_chart(
        args.out,
        cols[x_name],
        {name: cols[name] for name in y_names},
        xlabel=x_name,
        title=os.path.basename(getattr(args, "in")),
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coulombflow",
        description="Finite-volume / spectral laboratory for Coulomb-driven "
        "nonlinear-mobility transport on the unit torus",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run one integration")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out", default=None)
    p_sim.set_defaults(func=cmd_simulate)

    p_fr = sub.add_parser("fronts", help="integrate analytic front systems")
    p_fr.add_argument("--mode", required=True, choices=["single", "double", "super"])
    p_fr.add_argument("--config", required=True)
    p_fr.add_argument("--out", default=None)
    p_fr.set_defaults(func=cmd_fronts)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    p_ver.add_argument("--config", required=True)
    p_ver.add_argument("--out", default=None)
    p_ver.add_argument("--jobs", type=int, default=None)
    p_ver.set_defaults(func=cmd_verify)

    p_plot = sub.add_parser("plot", help="CSV columns to SVG line chart")
    p_plot.add_argument("--in", required=True)
    p_plot.add_argument("--out", required=True)
    p_plot.add_argument("--x", required=True)
    p_plot.add_argument("--y", required=True, help="comma-separated column names")
    p_plot.set_defaults(func=cmd_plot)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ConfigError, ValueError, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
