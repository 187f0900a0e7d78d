"""Configuration-driven command line front end.

Subcommands mirror the pipeline stages and are each runnable standalone:

    certify    model assumption certificate (JSON to stdout)
    bounds     certified bound constants per moment order (JSON to stdout)
    simulate   per-path CSV dump (paths.csv, optional trajectory dump)
    verify     full pipeline: report.json + paths.csv + verdicts.csv
    report     rebuild report.json/verdicts.csv from a trajectory dump

Exit codes: 0 all verdicts pass, 1 usage or config error, 2 verdict failure.

report.json must be byte-identical for a fixed seed regardless of
--threads, so wall-clock time goes to stderr and the report's "timing"
section carries deterministic work counters only.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional, Sequence

from . import bound_calc, mc_engine, path_analysis
from .model_zoo import BenchmarkModelSpec, KappaSpec, build_benchmark, certify
from .process_core import StopReason, Trajectory, simulate_path
from .streams import path_stream

__all__ = ["ConfigError", "ExperimentConfig", "main", "run"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERDICT_FAIL = 2

LOW_SAMPLE_THRESHOLD = 100


class ConfigError(ValueError):
    """Bad configuration; the message names the offending field."""


@dataclass(frozen=True, slots=True)
class ExperimentConfig:
    """Validated experiment parameters (see README for the file format)."""

    a: float = 0.5
    r: float = 0.5
    s: float = 0.5
    floor_n: int = 5
    x_grid: tuple[int, ...] = (6, 10, 20)
    m_list: tuple[int, ...] = (1, 2, 3)
    n_traj: int = 100_000
    seed: int = 7
    max_steps: int = 1_000_000
    epsilon: float = 1e-10
    threads: int = 1
    report_json: str = "report.json"
    paths_csv: str = "paths.csv"
    verdicts_csv: str = "verdicts.csv"
    trajectories_csv: Optional[str] = None

    def model_spec(self) -> BenchmarkModelSpec:
        return BenchmarkModelSpec(
            kappa=KappaSpec(a=self.a, r=self.r), up_jump_s=self.s, floor_n=self.floor_n
        )

    def to_dict(self) -> dict[str, Any]:
        # threads deliberately omitted: the echo lands in report.json,
        # whose bytes must not depend on the worker count
        return {
            "model": {"a": self.a, "r": self.r, "s": self.s},
            "floor_n": self.floor_n,
            "x_grid": list(self.x_grid),
            "m_list": list(self.m_list),
            "n_traj": self.n_traj,
            "seed": self.seed,
            "max_steps": self.max_steps,
            "epsilon": self.epsilon,
            "output": {
                "report_json": self.report_json,
                "paths_csv": self.paths_csv,
                "verdicts_csv": self.verdicts_csv,
                "trajectories_csv": self.trajectories_csv,
            },
        }


def _require(cond: bool, field_name: str, message: str) -> None:
    if not cond:
        raise ConfigError(f"config field '{field_name}': {message}")


def _as_int(raw: Any, field_name: str) -> int:
    _require(isinstance(raw, int) and not isinstance(raw, bool), field_name, "must be an integer")
    return raw


def _as_prob(raw: Any, field_name: str) -> float:
    _require(isinstance(raw, (int, float)) and not isinstance(raw, bool), field_name, "must be a number")
    value = float(raw)
    _require(0.0 < value < 1.0, field_name, f"must lie strictly between 0 and 1, got {value}")
    return value


def parse_config(data: dict[str, Any]) -> ExperimentConfig:
    """Build a validated config from a parsed JSON document."""
    _require(isinstance(data, dict), "<root>", "must be a JSON object")
    known = {
        "model", "floor_n", "x_grid", "m_list", "n_traj", "seed",
        "max_steps", "epsilon", "threads", "output",
    }
    for key in data:
        _require(key in known, key, "unknown field")
    defaults = ExperimentConfig()

    model = data.get("model", {})
    _require(isinstance(model, dict), "model", "must be an object with a, r, s")
    a = _as_prob(model.get("a", defaults.a), "model.a")
    r = _as_prob(model.get("r", defaults.r), "model.r")
    s = _as_prob(model.get("s", defaults.s), "model.s")

    floor_n = _as_int(data.get("floor_n", defaults.floor_n), "floor_n")
    _require(floor_n >= 0, "floor_n", "must be non-negative")

    x_grid_raw = data.get("x_grid", list(defaults.x_grid))
    _require(isinstance(x_grid_raw, list) and x_grid_raw, "x_grid", "must be a non-empty list")
    x_grid = tuple(_as_int(x, "x_grid") for x in x_grid_raw)
    _require(all(x >= 0 for x in x_grid), "x_grid", "entries must be non-negative")

    m_list_raw = data.get("m_list", list(defaults.m_list))
    _require(isinstance(m_list_raw, list) and m_list_raw, "m_list", "must be a non-empty list")
    m_list = tuple(_as_int(m, "m_list") for m in m_list_raw)
    _require(all(m >= 1 for m in m_list), "m_list", "entries must be >= 1")

    n_traj = _as_int(data.get("n_traj", defaults.n_traj), "n_traj")
    _require(n_traj >= 2, "n_traj", "must be >= 2")

    seed = _as_int(data.get("seed", defaults.seed), "seed")
    _require(0 <= seed < 2**64, "seed", "must be in [0, 2**64)")

    max_steps = _as_int(data.get("max_steps", defaults.max_steps), "max_steps")
    _require(max_steps >= 1, "max_steps", "must be >= 1")

    epsilon_raw = data.get("epsilon", defaults.epsilon)
    _require(
        isinstance(epsilon_raw, (int, float)) and not isinstance(epsilon_raw, bool) and epsilon_raw > 0,
        "epsilon", "must be a positive number",
    )
    epsilon = float(epsilon_raw)

    threads = _as_int(data.get("threads", defaults.threads), "threads")
    _require(threads >= 1, "threads", "must be >= 1")

    output = data.get("output", {})
    _require(isinstance(output, dict), "output", "must be an object")
    report_json = output.get("report_json", defaults.report_json)
    paths_csv = output.get("paths_csv", defaults.paths_csv)
    verdicts_csv = output.get("verdicts_csv", defaults.verdicts_csv)
    trajectories_csv = output.get("trajectories_csv", defaults.trajectories_csv)
    for name, value in (
        ("output.report_json", report_json),
        ("output.paths_csv", paths_csv),
        ("output.verdicts_csv", verdicts_csv),
    ):
        _require(isinstance(value, str) and value, name, "must be a non-empty string")
    _require(
        trajectories_csv is None or (isinstance(trajectories_csv, str) and trajectories_csv),
        "output.trajectories_csv", "must be null or a non-empty string",
    )

    return ExperimentConfig(
        a=a, r=r, s=s, floor_n=floor_n, x_grid=x_grid, m_list=m_list,
        n_traj=n_traj, seed=seed, max_steps=max_steps, epsilon=epsilon,
        threads=threads, report_json=report_json, paths_csv=paths_csv,
        verdicts_csv=verdicts_csv, trajectories_csv=trajectories_csv,
    )


def load_config(path: Optional[str]) -> ExperimentConfig:
    """Read and validate a JSON config file; None means built-in defaults."""
    if path is None:
        return ExperimentConfig()
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from exc
    return parse_config(data)


# ---------------------------------------------------------------- reporting


def _verdict_rows(report: mc_engine.VerificationReport) -> list[dict[str, Any]]:
    rows = []
    for v in report.verdicts:
        e = v.estimate
        rows.append({
            "quantity": e.quantity,
            "x0": e.x0,
            "order": e.m,
            "n_samples": e.n_samples,
            "mean": e.mean,
            "std_error": e.std_error,
            "ci99_upper": e.ci99_upper,
            "test_value": v.test_value,
            "bound": v.bound,
            "method": v.method,
            "passed": v.passed,
            "slack": v.slack,
        })
    return rows


def build_report(
    config: ExperimentConfig, report: mc_engine.VerificationReport
) -> dict[str, Any]:
    """Assemble the stable report document (deterministic for a fixed seed)."""
    spec = config.model_spec()
    cert = certify(spec, m_max=max(config.m_list))
    warnings = list(report.warnings)
    if config.n_traj < LOW_SAMPLE_THRESHOLD:
        warnings.append(f"low-sample warning: n_traj={config.n_traj} < {LOW_SAMPLE_THRESHOLD}")
    total_paths = sum(len(recs) for recs in report.records_by_x.values())
    total_steps = sum(r.steps for recs in report.records_by_x.values() for r in recs)
    capped = sum(1 for recs in report.records_by_x.values() for r in recs if r.capped)
    return {
        "config": config.to_dict(),
        "certificate": cert.to_dict(),
        "bound_sets": {str(m): bs.to_dict() for m, bs in sorted(report.bound_sets.items())},
        "estimates": [v.estimate.to_dict() for v in report.verdicts],
        "verdicts": _verdict_rows(report),
        "diagnostics": {
            str(x0): mc_engine.segment_breakdown(recs)
            for x0, recs in report.records_by_x.items()
        },
        "warnings": warnings,
        "timing": {
            "paths_simulated": total_paths,
            "steps_simulated": total_steps,
            "capped_paths": capped,
        },
    }


def _dump_json(doc: dict[str, Any], path: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if path is None:
        print(text)
    else:
        Path(path).write_text(text + "\n")


def write_paths_csv(path: str, records_by_x: dict[int, tuple[mc_engine.PathRecord, ...]]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path_id", "tau", "attempts", "max_state", "capped"])
        for x0 in records_by_x:
            for rec in records_by_x[x0]:
                writer.writerow([
                    rec.path_id,
                    "" if rec.tau is None else rec.tau,
                    rec.attempts,
                    rec.max_state,
                    int(rec.capped),
                ])


def write_verdicts_csv(path: str, report: mc_engine.VerificationReport) -> None:
    rows = _verdict_rows(report)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def write_trajectories_csv(path: str, trajectories: list[tuple[int, int, Trajectory]]) -> None:
    """Dump raw state sequences: one row per path, states space-separated."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x0", "path_id", "tau", "floor_n", "states"])
        for x0, pid, traj in trajectories:
            writer.writerow([
                x0, pid,
                "" if traj.tau is None else traj.tau,
                traj.floor_n,
                " ".join(str(s) for s in traj.states),
            ])


def read_trajectories_csv(path: str) -> list[tuple[int, int, Trajectory]]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            states = tuple(int(tok) for tok in row["states"].split())
            floor_n = int(row["floor_n"])
            tau = None if row["tau"] == "" else int(row["tau"])
            traj = Trajectory(
                x0=int(row["x0"]),
                states=states,
                floor_n=floor_n,
                stop_reason=StopReason.HIT_FLOOR if tau is not None else StopReason.STEP_CAP,
                tau=tau,
            )
            out.append((int(row["x0"]), int(row["path_id"]), traj))
    return out


# ------------------------------------------------------------- subcommands


def cmd_certify(config: ExperimentConfig, out: Optional[str]) -> int:
    cert = certify(config.model_spec(), m_max=max(config.m_list))
    _dump_json(cert.to_dict(), out)
    return EXIT_OK


def cmd_bounds(config: ExperimentConfig, out: Optional[str]) -> int:
    spec = config.model_spec()
    doc = {}
    for m in config.m_list:
        bs = bound_calc.make_bound_set(m, spec.kappa, spec.up_jump_s, config.epsilon)
        entry = bs.to_dict()
        entry["theorem_bound_at_x"] = {
            str(x): bound_calc.theorem_bound(m, x, bs).to_dict() for x in config.x_grid
        }
        doc[str(m)] = entry
    _dump_json(doc, out)
    return EXIT_OK


def cmd_simulate(config: ExperimentConfig) -> int:
    kernel = build_benchmark(config.model_spec())
    records_by_x: dict[int, tuple[mc_engine.PathRecord, ...]] = {}
    trajectories: list[tuple[int, int, Trajectory]] = []
    for task_index, x0 in enumerate(config.x_grid):
        if config.trajectories_csv is not None:
            recs = []
            for pid in range(config.n_traj):
                traj = simulate_path(
                    kernel, x0, config.max_steps, path_stream(config.seed, pid, task_index)
                )
                trajectories.append((x0, pid, traj))
                recs.append(mc_engine.record_from_trajectory(pid, traj))
            records_by_x[x0] = tuple(recs)
        else:
            records_by_x[x0] = tuple(mc_engine.simulate_records(
                kernel, x0, config.n_traj, config.seed, config.max_steps,
                task_index=task_index, threads=config.threads,
            ))
    write_paths_csv(config.paths_csv, records_by_x)
    if config.trajectories_csv is not None:
        write_trajectories_csv(config.trajectories_csv, trajectories)
    print(f"wrote {config.paths_csv}", file=sys.stderr)
    return EXIT_OK


def cmd_verify(config: ExperimentConfig) -> int:
    """Full pipeline: certify, bounds, simulate, verify, write reports."""
    start = time.perf_counter()
    spec = config.model_spec()
    kernel = build_benchmark(spec)
    report = mc_engine.verify(
        kernel, spec, config.x_grid, config.m_list, config.n_traj,
        config.seed, config.max_steps, config.epsilon, config.threads,
    )
    doc = build_report(config, report)
    _dump_json(doc, config.report_json)
    write_paths_csv(config.paths_csv, report.records_by_x)
    write_verdicts_csv(config.verdicts_csv, report)
    elapsed = time.perf_counter() - start
    n_pass = sum(1 for v in report.verdicts if v.passed)
    print(
        f"{n_pass}/{len(report.verdicts)} verdicts passed in {elapsed:.1f}s "
        f"-> {config.report_json}",
        file=sys.stderr,
    )
    return EXIT_OK if report.all_passed else EXIT_VERDICT_FAIL


def cmd_report(config: ExperimentConfig) -> int:
    """Recompute estimates and verdicts from a previous trajectory dump."""
    if config.trajectories_csv is None:
        raise ConfigError("config field 'output.trajectories_csv': required by the report command")
    dumped = read_trajectories_csv(config.trajectories_csv)
    if not dumped:
        raise ConfigError(f"no trajectories found in {config.trajectories_csv}")
    spec = config.model_spec()
    cert = certify(spec, m_max=max(config.m_list))
    if not cert.theorem_ready:
        raise ConfigError("model certificate does not satisfy the required assumptions")
    bound_sets = {
        m: bound_calc.make_bound_set(m, spec.kappa, spec.up_jump_s, config.epsilon)
        for m in config.m_list
    }
    by_x: dict[int, list[mc_engine.PathRecord]] = {}
    for x0, pid, traj in dumped:
        recomputed_tau = path_analysis.tau_of(traj.states, traj.floor_n)
        if recomputed_tau != traj.tau:
            raise ConfigError(
                f"trajectory dump row (x0={x0}, path_id={pid}) does not round-trip: "
                f"recorded tau={traj.tau}, recomputed tau={recomputed_tau}"
            )
        by_x.setdefault(x0, []).append(mc_engine.record_from_trajectory(pid, traj))
    verdicts: list[mc_engine.VerificationVerdict] = []
    warnings: list[str] = []
    records_by_x: dict[int, tuple[mc_engine.PathRecord, ...]] = {}
    for x0, recs in by_x.items():
        recs.sort(key=lambda r: r.path_id)
        records_by_x[x0] = tuple(recs)
        vs, ws = mc_engine.verdicts_for_records(x0, recs, config.m_list, bound_sets)
        verdicts.extend(vs)
        warnings.extend(ws)
    report = mc_engine.VerificationReport(
        verdicts=tuple(verdicts),
        bound_sets=bound_sets,
        records_by_x=records_by_x,
        warnings=tuple(warnings),
    )
    _dump_json(build_report(config, report), config.report_json)
    write_verdicts_csv(config.verdicts_csv, report)
    return EXIT_OK if report.all_passed else EXIT_VERDICT_FAIL


def run(config_path: Optional[str], seed: Optional[int] = None, threads: Optional[int] = None) -> int:
    """Run the whole pipeline for a config file; returns the exit code."""
    try:
        config = _override(load_config(config_path), seed, threads)
        return cmd_verify(config)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def _override(config: ExperimentConfig, seed: Optional[int], threads: Optional[int]) -> ExperimentConfig:
    if seed is None and threads is None:
        return config
    from dataclasses import replace

    kwargs: dict[str, Any] = {}
    if seed is not None:
        if not 0 <= seed < 2**64:
            raise ConfigError("config field 'seed': must be in [0, 2**64)")
        kwargs["seed"] = seed
    if threads is not None:
        if threads < 1:
            raise ConfigError("config field 'threads': must be >= 1")
        kwargs["threads"] = threads
    return replace(config, **kwargs)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="markovup",
        description="Simulation and moment-bound verification for Markov-up processes.",
    )
    parser.add_argument("--seed", type=int, default=None, help="override the config seed")
    parser.add_argument(
        "--threads", type=int, default=None,
        help="worker count (affects speed only, never results)",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("certify", "print the model assumption certificate"),
        ("bounds", "print the certified bound constants"),
        ("simulate", "simulate paths and write paths.csv"),
        ("verify", "full pipeline: certify, bounds, simulate, verify"),
        ("report", "rebuild the report from an existing trajectory dump"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("config", nargs="?", default=None, help="JSON config file (defaults built in)")
        if name in ("certify", "bounds"):
            p.add_argument("--out", default=None, help="write JSON here instead of stdout")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _override(load_config(args.config), args.seed, args.threads)
        if args.command == "certify":
            return cmd_certify(config, args.out)
        if args.command == "bounds":
            return cmd_bounds(config, args.out)
        if args.command == "simulate":
            return cmd_simulate(config)
        if args.command == "verify":
            return cmd_verify(config)
        if args.command == "report":
            return cmd_report(config)
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
