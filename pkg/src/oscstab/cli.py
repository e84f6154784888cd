"""Configuration-driven command line: run, validate, sweep.

Exit codes: 0 success, 2 config error, 3 runtime failure (domain exit,
singular feedback matrix, failed validation), 4 certification failure when
--require-stable is set.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .analysis import (
    REPORT_COLUMNS,
    TrajectoryTooShort,
    certify_practical,
    export_report_csv,
    format_report_row,
    sweep_summary,
)
from .config import (
    RunConfig,
    apply_set_overrides,
    build_scenario,
    parse_config,
    serialize_config,
)
from .errors import ConfigError, KappaStructureError, OscstabError
from .liealg import check_rank
from .plotting import plot_trajectory_svg
from .resonance import validate_kappa
from .simulator import COMPLETED, export_trajectory_csv, pi_eps_solve

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_CERTIFICATION = 4


def _load_config(args) -> RunConfig:
    if args.config:
        text = Path(args.config).read_text()
        cfg = parse_config(text)
    else:
        cfg = RunConfig()
    if getattr(args, "scenario", None):
        cfg.scenario = args.scenario
    cfg = apply_set_overrides(cfg, args.set or [])
    if cfg.scenario is None and cfg.system_spec is None:
        raise ConfigError(
            "no scenario selected: pass --config with a `scenario` entry, "
            "--scenario NAME, or an inline [system]"
        )
    return cfg


def _output_path(args, configured, default_name) -> Path:
    outdir = Path(args.output_dir or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    return outdir / (configured or default_name)


def _failure_row(eps, gamma):
    return {
        "eps": eps,
        "gamma": gamma,
        "lambda_fit": None,
        "r_squared": None,
        "rho_est": None,
        "t1_est": None,
        "envelope_ok": False,
    }


def _simulate_and_certify(cfg: RunConfig):
    scenario = build_scenario(cfg)
    law = scenario.make_law()
    traj = pi_eps_solve(
        scenario.system,
        law,
        list(scenario.x0),
        horizon=scenario.horizon,
        substeps_per_period=cfg.substeps,
        scenario=scenario.name,
    )
    report = None
    if traj.status == COMPLETED:
        try:
            report = certify_practical(traj, scenario.rho)
        except TrajectoryTooShort:
            report = None
    return scenario, traj, report


def cmd_run(args) -> int:
    cfg = _load_config(args)
    scenario, traj, report = _simulate_and_certify(cfg)
    csv_path = _output_path(args, cfg.csv, f"{scenario.name}_trajectory.csv")
    svg_path = _output_path(args, cfg.svg, f"{scenario.name}_trajectory.svg")
    report_path = _output_path(args, cfg.report, f"{scenario.name}_report.csv")
    export_trajectory_csv(traj, csv_path)
    plot_trajectory_svg(traj, svg_path, title=scenario.name)
    print(f"trajectory: {csv_path}")
    print(f"plot:       {svg_path}")
    if report is not None:
        rows = sweep_summary([({"eps": scenario.eps, "gamma": scenario.gamma}, report)])
        export_report_csv(rows, report_path)
        print(f"report:     {report_path}")
        print(
            f"certification: envelope_ok={str(report.envelope_ok).lower()} "
            f"lambda_fit={report.lambda_fit:.6g} rho_est={report.rho_est:.6g} "
            f"t1_est={'-' if report.t1_est is None else f'{report.t1_est:.6g}'}"
        )
    if traj.status != COMPLETED:
        print(f"run failed: {traj.status}: {traj.diagnostic}", file=sys.stderr)
        return EXIT_RUNTIME
    if args.require_stable and (report is None or not report.envelope_ok):
        print("certification failed (--require-stable)", file=sys.stderr)
        return EXIT_CERTIFICATION
    return EXIT_OK


def cmd_validate(args) -> int:
    cfg = _load_config(args)
    scenario = build_scenario(cfg)
    failed = False

    print(f"scenario: {scenario.name} ({scenario.provenance})")
    print(f"generators: {', '.join(scenario.sets.generator_labels())}")

    rank = check_rank(scenario.system.fields, scenario.sets, scenario.rank_points)
    dets = [s.abs_det for s in rank.samples if s.ok]
    conds = [s.cond for s in rank.samples if s.ok]
    print(
        f"rank condition: {'pass' if rank.passed else 'FAIL'} on "
        f"{len(rank.samples)} sample states"
    )
    if dets:
        print(f"  min |det F| = {min(dets):.6g}, max condition estimate = {max(conds):.6g}")
        print(f"  max |F^-1| = {rank.max_inverse_norm:.6g}")
    for s in rank.samples:
        if not s.ok:
            print(f"  failed at x = {s.x}: {s.error or f'condition {s.cond:.3e}'}")
    failed = failed or not rank.passed

    try:
        diag = validate_kappa(scenario.kappa)
    except KappaStructureError as err:
        print(f"multipliers: structural error: {err}")
        return EXIT_CONFIG
    if diag.passed:
        print("multipliers: pass (distinct, no non-imposed order-3 resonances)")
    else:
        for msg in diag.messages():
            print(f"multipliers: warning: {msg}")
        if scenario.acknowledge_kappa_warnings:
            print("multipliers: warnings acknowledged by the scenario; proceeding")
        else:
            print("multipliers: FAIL (unacknowledged)")
            failed = True
    for msg in diag.cross_warnings:
        print(f"multipliers: cross-tuple warning: {msg}")

    drift = scenario.system.drift
    print(f"drift: {drift.kind}, declared m_g = {drift.m_g:.6g}"
          + (f", l_g = {drift.l_g:.6g}" if drift.l_g is not None else ""))

    if not scenario.system.domain_guard(list(scenario.x0)):
        print(f"initial state {scenario.x0} is outside the domain")
        return EXIT_CONFIG
    print(f"initial state inside domain: yes; gamma*eps = {scenario.gamma * scenario.eps:.6g}")
    if scenario.gamma * scenario.eps >= 1.0:
        print(
            "  note: gamma*eps >= 1, outside the sampled-data contraction regime; "
            "expect divergence or domain exit at these settings"
        )
    return EXIT_RUNTIME if failed else EXIT_OK


def _sweep_task(payload):
    text, eps, gamma, substeps = payload
    cfg = parse_config(text)
    cfg.eps = eps
    cfg.gamma = gamma
    cfg.substeps = substeps
    try:
        scenario, traj, report = _simulate_and_certify(cfg)
    except OscstabError as err:
        row = _failure_row(eps, gamma)
        row["status"] = f"error: {err}"
        return row
    if report is None:
        row = _failure_row(eps, gamma)
        row["status"] = traj.status if traj.status != COMPLETED else "too_short"
        return row
    row = report.as_row(eps, gamma)
    row["status"] = traj.status
    return row


def cmd_sweep(args) -> int:
    cfg = _load_config(args)
    scenario = build_scenario(cfg)  # validates before any simulation
    eps_grid = cfg.sweep_eps or [scenario.eps]
    gamma_grid = cfg.sweep_gamma or [scenario.gamma]
    if not eps_grid or not gamma_grid:
        raise ConfigError("sweep grids must be nonempty")
    base_text = serialize_config(
        RunConfig(
            scenario=cfg.scenario,
            system_spec=cfg.system_spec,
            horizon=cfg.horizon,
            rho=cfg.rho,
            x0=cfg.x0,
            x_star=cfg.x_star,
            kappa_s2=cfg.kappa_s2,
            kappa_s3=cfg.kappa_s3,
            amplitude_rule=cfg.amplitude_rule,
            eps=cfg.eps,
            gamma=cfg.gamma,
        )
    )
    tasks = [
        (base_text, eps, gamma, cfg.substeps)
        for eps in eps_grid
        for gamma in gamma_grid
    ]
    workers = args.workers or cfg.workers or min(4, os.cpu_count() or 1, len(tasks))
    if workers > 1 and len(tasks) > 1:
        try:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_sweep_task, tasks))
        except OSError:
            rows = [_sweep_task(t) for t in tasks]
    else:
        rows = [_sweep_task(t) for t in tasks]
    rows.sort(key=lambda r: (r["eps"], r["gamma"]))
    report_path = _output_path(args, cfg.report, f"{scenario.name}_sweep.csv")
    export_report_csv(rows, report_path)
    print(f"sweep report: {report_path}")
    print(",".join(REPORT_COLUMNS) + ",status")
    for row in rows:
        print(format_report_row(row) + f",{row.get('status', '')}")
    if args.require_stable and any(not r["envelope_ok"] for r in rows):
        print("at least one sweep cell failed certification (--require-stable)", file=sys.stderr)
        return EXIT_CERTIFICATION
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscstab",
        description=(
            "Synthesize oscillating time-periodic feedback for bracket-generating "
            "control systems, simulate the sampled closed loop, and certify decay."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in (("run", cmd_run), ("validate", cmd_validate), ("sweep", cmd_sweep)):
        p = sub.add_parser(name)
        p.add_argument("--config", help="TOML run configuration")
        p.add_argument("--scenario", help="built-in scenario name (alternative to --config)")
        p.add_argument(
            "--set", action="append", metavar="KEY=VALUE",
            help="override a config entry, e.g. eps=0.05 or outputs.csv=out.csv",
        )
        p.add_argument("--output-dir", help="directory for output files (default: .)")
        p.add_argument("--require-stable", action="store_true",
                       help="exit 4 unless certification passes")
        if name == "sweep":
            p.add_argument("--workers", type=int, help="parallel worker processes")
        p.set_defaults(handler=handler)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (ConfigError, KappaStructureError, FileNotFoundError, KeyError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OscstabError as err:
        print(f"runtime error: {err}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
