"""Command-line front end: config parsing, CSV/JSON emission, manifests.

Configs are JSON documents with up to four sections::

    {
      "problem": {"p0": 0.5, "c01": 0.3, "c10": 0.5, "c00": 0, "c11": 0},
      "noise":   {"sigma_p0": 0.1, "sigma_c01": 0, "sigma_c10": 0,
                  "family_p": "beta", "family_c": "exact", "delta_mode": false},
      "run":     {"trials": 100000, "seed": 42, "stream_id": 0},
      "sweep":   {"kind": "figure2", "sigma_grid": [...], "p0_grid": [...],
                  "cost_pairs": [[0.3, 0.5]], "trials": 10000, "run_mc": true}
    }

Unknown keys are rejected, never ignored; omitted families default from
the standard errors (``exact`` at zero, else Beta / truncated Uniform).
A document with a ``sweep`` section parses to a SweepConfig, anything
else to a SimulationConfig.

Every data file gets a ``<name>.manifest.json`` sibling recording the
tool version, the fully resolved config (round-trippable through
``parse_config``), the seed, and sampler adjustment tallies. Given equal
manifests (timestamp aside), two runs produce byte-identical data files;
the ``UDECIDE_THREADS`` environment variable caps worker parallelism
without affecting any output byte.

Exit codes: 0 success, 2 config/usage validation error, 3 runtime
(sampler exhaustion) error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Mapping, Sequence

from . import __version__
from .decision_core import (
    COST_FAMILIES,
    P_FAMILIES,
    DecisionProblem,
    NoiseSpec,
    expected_increase,
)
from .estimators import SamplerExhaustionError
from .experiments import (
    SweepConfig,
    SweepRow,
    figure1_config,
    figure2_config,
    run_sweep,
)
from .montecarlo import SimulationConfig, simulate
from .plotting import emit_plot

__all__ = [
    "CSV_HEADER",
    "CliInvocation",
    "ConfigError",
    "RunManifest",
    "emit_csv",
    "emit_json",
    "emit_plot",
    "main",
    "parse_config",
    "resolved_config",
]

_U64_MAX = 2 ** 64 - 1


class ConfigError(ValueError):
    """A config document or invocation violates the schema."""


@dataclass(frozen=True, slots=True)
class CliInvocation:
    """A parsed command line."""

    subcommand: str
    out_path: Path
    format: str
    config_path: Path | None = None
    plot_path: Path | None = None
    seed: int | None = None
    trials: int | None = None


# ---------------------------------------------------------------------------
# Config parsing


def _require_mapping(value: Any, path: str) -> dict:
    if not isinstance(value, Mapping):
        raise ConfigError(f"{path}: expected an object, got {type(value).__name__}")
    return dict(value)


def _reject_unknown(section: dict, allowed: Sequence[str], path: str) -> None:
    unknown = set(section) - set(allowed)
    if unknown:
        raise ConfigError(
            f"{path}: unknown key(s) {sorted(unknown)}; allowed: {list(allowed)}"
        )


def _number(section: dict, key: str, default: float, path: str,
            lo: float | None = None, hi: float | None = None) -> float:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}.{key}: expected a number, got {value!r}")
    value = float(value)
    if lo is not None and value < lo:
        bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
        raise ConfigError(f"{path}.{key}: must be {bound}, got {value}")
    if hi is not None and value > hi:
        raise ConfigError(f"{path}.{key}: must be in [{lo}, {hi}], got {value}")
    return value


def _integer(section: dict, key: str, default: int, path: str,
             lo: int = 0, hi: int = _U64_MAX) -> int:
    value = section.get(key, default)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{path}.{key}: expected an integer, got {value!r}")
    if not lo <= value <= hi:
        raise ConfigError(f"{path}.{key}: must be in [{lo}, {hi}], got {value}")
    return value


def _parse_problem(doc: dict) -> DecisionProblem:
    if "problem" not in doc:
        raise ConfigError("problem: section is required")
    section = _require_mapping(doc["problem"], "problem")
    _reject_unknown(section, ("p0", "c00", "c01", "c10", "c11"), "problem")
    for key in ("p0", "c01", "c10"):
        if key not in section:
            raise ConfigError(f"problem.{key}: key is required")
    return DecisionProblem(
        p0=_number(section, "p0", 0.0, "problem", lo=0.0, hi=1.0),
        c01=_number(section, "c01", 0.0, "problem", lo=0.0),
        c10=_number(section, "c10", 0.0, "problem", lo=0.0),
        c00=_number(section, "c00", 0.0, "problem", lo=0.0),
        c11=_number(section, "c11", 0.0, "problem", lo=0.0),
    )


def _parse_noise(doc: dict) -> NoiseSpec:
    section = _require_mapping(doc.get("noise", {}), "noise")
    _reject_unknown(
        section,
        ("sigma_p0", "sigma_c01", "sigma_c10", "family_p", "family_c", "delta_mode"),
        "noise",
    )
    sp = _number(section, "sigma_p0", 0.0, "noise", lo=0.0)
    s01 = _number(section, "sigma_c01", 0.0, "noise", lo=0.0)
    s10 = _number(section, "sigma_c10", 0.0, "noise", lo=0.0)
    family_p = section.get("family_p", "exact" if sp == 0.0 else "beta")
    family_c = section.get(
        "family_c", "exact" if s01 == 0.0 and s10 == 0.0 else "uniform-truncated"
    )
    if family_p not in P_FAMILIES:
        raise ConfigError(f"noise.family_p: must be one of {P_FAMILIES}, got {family_p!r}")
    if family_c not in COST_FAMILIES:
        raise ConfigError(f"noise.family_c: must be one of {COST_FAMILIES}, got {family_c!r}")
    delta_mode = section.get("delta_mode", False)
    if not isinstance(delta_mode, bool):
        raise ConfigError(f"noise.delta_mode: expected a boolean, got {delta_mode!r}")
    try:
        return NoiseSpec(
            sigma_p0=sp, sigma_c01=s01, sigma_c10=s10,
            family_p=family_p, family_c=family_c, delta_mode=delta_mode,
        )
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from exc


def _parse_sweep(doc: dict, run: dict) -> SweepConfig:
    section = _require_mapping(doc["sweep"], "sweep")
    _reject_unknown(
        section,
        ("kind", "sigma_grid", "p0_grid", "cost_pairs", "trials", "run_mc"),
        "sweep",
    )
    kind = section.get("kind")
    if kind not in ("figure1", "figure2"):
        raise ConfigError(f"sweep.kind: must be 'figure1' or 'figure2', got {kind!r}")
    seed = _integer(run, "seed", 42, "run")
    base = figure1_config(seed) if kind == "figure1" else figure2_config(seed)

    if "trials" in section:
        trials = _integer(section, "trials", base.trials, "sweep", lo=1)
    elif "trials" in run:
        trials = _integer(run, "trials", base.trials, "run", lo=1)
    else:
        trials = base.trials

    sigma_grid = base.sigma_grid
    if "sigma_grid" in section:
        raw = section["sigma_grid"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("sweep.sigma_grid: expected a non-empty array of numbers")
        sigma_grid = tuple(
            _number({"v": s}, "v", 0.0, f"sweep.sigma_grid[{i}]", lo=0.0)
            for i, s in enumerate(raw)
        )

    p0_grid = base.p0_grid
    if "p0_grid" in section:
        raw = section["p0_grid"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("sweep.p0_grid: expected a non-empty array of numbers")
        p0_grid = tuple(
            _number({"v": p}, "v", 0.0, f"sweep.p0_grid[{i}]", lo=0.0, hi=1.0)
            for i, p in enumerate(raw)
        )

    cost_pairs = base.cost_pairs
    if "cost_pairs" in section:
        raw = section["cost_pairs"]
        if not isinstance(raw, list) or not raw:
            raise ConfigError("sweep.cost_pairs: expected a non-empty array of [c01, c10] pairs")
        pairs = []
        for i, item in enumerate(raw):
            if not isinstance(item, list) or len(item) != 2:
                raise ConfigError(f"sweep.cost_pairs[{i}]: expected a [c01, c10] pair")
            pairs.append((
                _number({"v": item[0]}, "v", 0.0, f"sweep.cost_pairs[{i}][0]", lo=0.0),
                _number({"v": item[1]}, "v", 0.0, f"sweep.cost_pairs[{i}][1]", lo=0.0),
            ))
        cost_pairs = tuple(pairs)

    run_mc = section.get("run_mc", base.run_mc)
    if not isinstance(run_mc, bool):
        raise ConfigError(f"sweep.run_mc: expected a boolean, got {run_mc!r}")

    try:
        return SweepConfig(
            kind=kind, sigma_grid=sigma_grid, p0_grid=p0_grid,
            cost_pairs=cost_pairs, trials=trials, master_seed=seed, run_mc=run_mc,
        )
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc


def parse_config(document: str | Mapping) -> SweepConfig | SimulationConfig:
    """Validate a config document (JSON text or mapping) into a config.

    Every value constraint is checked here with key-precise messages; a
    document with a ``sweep`` section yields a SweepConfig, otherwise a
    SimulationConfig built from the required ``problem`` section.
    """
    if isinstance(document, str):
        try:
            doc = json.loads(document)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"config is not valid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})"
            ) from exc
    else:
        doc = document
    doc = _require_mapping(doc, "config")
    _reject_unknown(doc, ("problem", "noise", "run", "sweep"), "config")
    run = _require_mapping(doc.get("run", {}), "run")
    _reject_unknown(run, ("trials", "seed", "stream_id"), "run")

    if "sweep" in doc:
        if "noise" in doc:
            raise ConfigError(
                "noise: not allowed with a sweep section (scenarios set the noise)"
            )
        if "problem" in doc:
            raise ConfigError(
                "problem: not allowed with a sweep section (the grids set the problems)"
            )
        return _parse_sweep(doc, run)

    problem = _parse_problem(doc)
    noise = _parse_noise(doc)
    return SimulationConfig(
        problem=problem,
        noise=noise,
        trials=_integer(run, "trials", 100_000, "run", lo=1),
        master_seed=_integer(run, "seed", 42, "run"),
        stream_id=_integer(run, "stream_id", 0, "run"),
    )


def resolved_config(config: SweepConfig | SimulationConfig) -> dict:
    """Fully explicit document for ``config``; parses back to an equal value."""
    if isinstance(config, SweepConfig):
        return {
            "sweep": {
                "kind": config.kind,
                "sigma_grid": list(config.sigma_grid),
                "p0_grid": list(config.p0_grid),
                "cost_pairs": [list(pair) for pair in config.cost_pairs],
                "trials": config.trials,
                "run_mc": config.run_mc,
            },
            "run": {"seed": config.master_seed},
        }
    problem, noise = config.problem, config.noise
    return {
        "problem": {
            "p0": problem.p0, "c01": problem.c01, "c10": problem.c10,
            "c00": problem.c00, "c11": problem.c11,
        },
        "noise": {
            "sigma_p0": noise.sigma_p0, "sigma_c01": noise.sigma_c01,
            "sigma_c10": noise.sigma_c10, "family_p": noise.family_p,
            "family_c": noise.family_c, "delta_mode": noise.delta_mode,
        },
        "run": {
            "trials": config.trials, "seed": config.master_seed,
            "stream_id": config.stream_id,
        },
    }


# ---------------------------------------------------------------------------
# Output emission

CSV_HEADER = (
    "scenario", "p0", "c01", "c10", "sigma_p", "sigma_c01", "sigma_c10",
    "delta", "l_star", "var_delta_hat", "p_err_analytic", "delta_inc_analytic",
    "norm_inc_analytic", "p_err_mc", "delta_inc_mc", "norm_inc_mc",
    "trials", "seed", "clamped", "truncations",
)


def _format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".9g")
    return str(value)


def row_record(row: SweepRow) -> dict[str, Any]:
    """The row's emitted fields, keyed by CSV column name."""
    return {name: getattr(row, name) for name in CSV_HEADER}


def emit_csv(rows: Sequence[SweepRow], path: str | Path) -> None:
    """Write rows as CSV with the fixed schema; bytes are deterministic.

    Reals carry 9 significant digits; undefined values print as empty
    fields and flags as ``true`` / ``false``.
    """
    if not rows:
        raise ValueError("emit_csv requires at least one row")
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([_format_cell(v) for v in row_record(row).values()])


def emit_json(rows: Sequence[SweepRow], path: str | Path) -> None:
    """Write rows as a JSON array of records with the CSV column names."""
    if not rows:
        raise ValueError("emit_json requires at least one row")
    records = [row_record(row) for row in rows]
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(records, handle, indent=2)
        handle.write("\n")


@dataclass(frozen=True, slots=True)
class RunManifest:
    """Reproducibility sidecar written next to every data file.

    Two runs whose manifests agree on everything but the timestamp
    produce byte-identical data files.
    """

    tool: str
    version: str
    subcommand: str
    seed: int
    trials: int
    config: dict
    flags: dict
    timestamp: str

    @classmethod
    def for_run(cls, subcommand: str, config: SweepConfig | SimulationConfig,
                rows: Sequence[SweepRow]) -> "RunManifest":
        cell_rows = [r for r in rows if not r.is_summary]
        flags = {
            "clamped_cells": sum(1 for r in cell_rows if r.clamped),
            "truncation_total": sum(r.truncations or 0 for r in cell_rows),
            "undefined_norm_cells": sum(
                1 for r in cell_rows if r.norm_inc_analytic is None
            ),
            "failed_cells": [
                {"scenario": r.scenario, "p0": r.p0, "c01": r.c01, "c10": r.c10,
                 "error": r.error}
                for r in cell_rows if r.error is not None
            ],
        }
        return cls(
            tool="udecide",
            version=__version__,
            subcommand=subcommand,
            seed=config.master_seed,
            trials=config.trials,
            config=resolved_config(config),
            flags=flags,
            timestamp=datetime.now(timezone.utc).isoformat(),
        )

    def write(self, data_path: str | Path) -> Path:
        path = Path(f"{data_path}.manifest.json")
        payload = {
            "tool": self.tool, "version": self.version,
            "subcommand": self.subcommand, "seed": self.seed,
            "trials": self.trials, "config": self.config,
            "flags": self.flags, "timestamp": self.timestamp,
        }
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2)
            handle.write("\n")
        return path


# ---------------------------------------------------------------------------
# CLI


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value <= _U64_MAX:
        raise argparse.ArgumentTypeError(f"must be an unsigned 64-bit integer, got {value}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="udecide",
        description="Sensitivity of binary decisions to probability and "
                    "utility estimation error.",
    )
    parser.add_argument("--version", action="version", version=f"udecide {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    specs = {
        "analytic": "closed-form sensitivity for one problem/noise config",
        "simulate": "Monte Carlo sensitivity for one problem/noise config",
        "figure1": "analytic sensitivity sweep (6 priors x 1 cost pair)",
        "figure2": "Monte Carlo validation sweep (25 x 25 grid)",
    }
    for name, help_text in specs.items():
        sub = subparsers.add_parser(name, help=help_text)
        sub.add_argument(
            "--config", type=Path, default=None,
            required=name in ("analytic", "simulate"),
            help="path to a JSON config document",
        )
        sub.add_argument("--out", type=Path, required=True, help="output data file")
        sub.add_argument("--format", choices=("csv", "json"), default="csv")
        sub.add_argument("--seed", type=_u64, default=None,
                         help="master seed override (default 42)")
        sub.add_argument("--trials", type=_positive_int, default=None,
                         help="trials-per-configuration override")
        if name in ("figure1", "figure2"):
            sub.add_argument("--plot", type=Path, default=None,
                             help="also render the summary chart here (SVG by default)")
    return parser


def _max_workers() -> int | None:
    raw = os.environ.get("UDECIDE_THREADS")
    if raw is None:
        return None
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"UDECIDE_THREADS: expected a positive integer, got {raw!r}")
    if value < 1:
        raise ConfigError(f"UDECIDE_THREADS: expected a positive integer, got {value}")
    hardware = os.cpu_count() or 1
    return min(value, hardware)


def _load_document(invocation: CliInvocation) -> dict:
    if invocation.config_path is None:
        return {}
    try:
        text = invocation.config_path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {invocation.config_path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{invocation.config_path}: invalid JSON: {exc.msg} "
            f"(line {exc.lineno}, column {exc.colno})"
        ) from exc
    return _require_mapping(doc, "config")


def _merge_overrides(doc: dict, invocation: CliInvocation) -> dict:
    doc = {key: dict(value) if isinstance(value, Mapping) else value
           for key, value in doc.items()}
    if invocation.subcommand in ("figure1", "figure2"):
        sweep = dict(doc.get("sweep", {}))
        kind = sweep.setdefault("kind", invocation.subcommand)
        if kind != invocation.subcommand:
            raise ConfigError(
                f"sweep.kind: config says {kind!r} but the subcommand is "
                f"{invocation.subcommand!r}"
            )
        if invocation.trials is not None:
            sweep["trials"] = invocation.trials
        doc["sweep"] = sweep
    elif invocation.trials is not None:
        run = dict(doc.get("run", {}))
        run["trials"] = invocation.trials
        doc["run"] = run
    if invocation.seed is not None:
        run = dict(doc.get("run", {}))
        run["seed"] = invocation.seed
        doc["run"] = run
    return doc


def _single_rows(invocation: CliInvocation, config: SimulationConfig) -> list[SweepRow]:
    problem, noise = config.problem, config.noise
    analytic = expected_increase(problem, noise)
    p_err_mc = delta_inc_mc = norm_inc_mc = None
    clamped: bool | None = None
    truncations: int | None = None
    if invocation.subcommand == "simulate":
        result = simulate(config)
        p_err_mc = result.p_err_hat
        delta_inc_mc = result.delta_inc_hat
        norm_inc_mc = result.norm_inc_hat
        clamped = result.clamp_flag
        truncations = result.truncation_count
    return [SweepRow(
        scenario=invocation.subcommand,
        p0=problem.p0, c01=problem.c01, c10=problem.c10,
        sigma_p=noise.sigma_p0, sigma_c01=noise.sigma_c01, sigma_c10=noise.sigma_c10,
        delta=analytic.delta, l_star=analytic.l_star,
        var_delta_hat=analytic.var_delta_hat, p_err_analytic=analytic.p_err,
        delta_inc_analytic=analytic.delta_inc, norm_inc_analytic=analytic.norm_inc,
        p_err_mc=p_err_mc, delta_inc_mc=delta_inc_mc, norm_inc_mc=norm_inc_mc,
        trials=config.trials, seed=config.master_seed,
        clamped=clamped, truncations=truncations,
    )]


def _run(invocation: CliInvocation) -> int:
    workers = _max_workers()
    doc = _merge_overrides(_load_document(invocation), invocation)
    config = parse_config(doc)

    if invocation.subcommand in ("analytic", "simulate"):
        if not isinstance(config, SimulationConfig):
            raise ConfigError(
                f"{invocation.subcommand}: config must describe a single "
                "problem, not a sweep"
            )
        rows = _single_rows(invocation, config)
    else:
        if not isinstance(config, SweepConfig):
            raise ConfigError(f"{invocation.subcommand}: config must contain a sweep section")
        rows = run_sweep(config, max_workers=workers)

    if invocation.format == "csv":
        emit_csv(rows, invocation.out_path)
    else:
        emit_json(rows, invocation.out_path)
    RunManifest.for_run(invocation.subcommand, config, rows).write(invocation.out_path)

    if invocation.plot_path is not None:
        emit_plot([r for r in rows if r.is_summary], invocation.plot_path)
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    invocation = CliInvocation(
        subcommand=args.subcommand,
        out_path=args.out,
        format=args.format,
        config_path=args.config,
        plot_path=getattr(args, "plot", None),
        seed=args.seed,
        trials=args.trials,
    )
    try:
        return _run(invocation)
    except ConfigError as exc:
        print(f"udecide: config error: {exc}", file=sys.stderr)
        return 2
    except SamplerExhaustionError as exc:
        print(f"udecide: sampler error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
