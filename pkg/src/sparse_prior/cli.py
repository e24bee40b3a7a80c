"""Command-line front end for the benchmark harness.

Subcommands map one to one onto run kinds: ``convergence``, ``sweep-m``,
``sweep-noise``, ``single``. Each run writes two files into the output
directory, ``<subcommand>_<timestamp>.csv`` with the aggregated rows and
``<subcommand>_<timestamp>.json`` with the same rows plus the configuration
echo and master seed. The timestamp only names the files; the contents are
fully determined by the configuration, so reruns produce identical bytes.

Configuration is resolved in precedence order: command-line flags beat config
file values, which beat the ``SPARSE_PRIOR_SEED`` environment variable (seed
only), which beats the built-in defaults.

By default the experiment runs in the calling process. With ``--server`` the
same request is POSTed to a running benchmark service instead and the CLI
only writes the returned results.

Exit codes: 0 success, 1 configuration or I/O error, 2 when every trial of a
run failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Any

from .bench import (
    ALGORITHM_NAMES,
    AllTrialsDegenerateError,
    render_csv,
    run_experiment,
    summary_dict,
)
from .config import ConfigError, load_config, resolve_config

__all__ = ["CliInvocation", "build_parser", "main", "entry"]

SEED_ENV_VAR = "SPARSE_PRIOR_SEED"
SUBCOMMANDS = ("convergence", "sweep-m", "sweep-noise", "single")


@dataclass(frozen=True)
class CliInvocation:
    """Parsed command line: one subcommand plus optional overrides."""

    subcommand: str
    config_path: str | None = None
    out_dir: str = "results"
    seed: int | None = None
    trials: int | None = None
    algos: str | None = None
    threads: int = 1
    server: str | None = None
    verbose: bool = False


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparse-prior",
        description="Monte Carlo benchmarks for sparse recovery with activation priors",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True, metavar="subcommand")
    descriptions = {
        "convergence": "score the iterative solvers after every iteration",
        "sweep-m": "sweep the measurement count over the configured grid",
        "sweep-noise": "sweep the noise variance over the configured grid",
        "single": "run one trial and report each algorithm once",
    }
    for name in SUBCOMMANDS:
        p = sub.add_parser(name, help=descriptions[name])
        p.add_argument("--config", default=None, help="path to a JSON configuration file")
        p.add_argument("--out", default="results", help="output directory (default: results)")
        p.add_argument("--seed", type=int, default=None, help="master seed override")
        p.add_argument("--trials", type=int, default=None, help="trial count override")
        p.add_argument(
            "--algos",
            default=None,
            help=f"comma-separated roster from {{{','.join(ALGORITHM_NAMES)}}}",
        )
        p.add_argument(
            "--threads",
            type=int,
            default=1,
            help="worker processes for trials (0 = one per CPU, default 1)",
        )
        p.add_argument(
            "--server",
            default=None,
            help="base URL of a benchmark service; runs there instead of in-process",
        )
        p.add_argument("--verbose", action="store_true", help="report progress on stderr")
    return parser


def parse_args(argv: list[str]) -> CliInvocation:
    args = build_parser().parse_args(argv)
    return CliInvocation(
        subcommand=args.subcommand,
        config_path=args.config,
        out_dir=args.out,
        seed=args.seed,
        trials=args.trials,
        algos=args.algos,
        threads=args.threads,
        server=args.server,
        verbose=args.verbose,
    )


def _seed_from_env() -> int | None:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return None
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(
            f"environment variable {SEED_ENV_VAR} must be an integer, got {raw!r}"
        ) from None


def _merge_inputs(invocation: CliInvocation) -> tuple[dict[str, Any], dict[str, Any]]:
    """File data and override dict implementing the precedence rules."""
    data = load_config(invocation.config_path) if invocation.config_path else {}
    overrides: dict[str, Any] = {}
    if invocation.seed is not None:
        overrides["seed"] = invocation.seed
    elif "seed" not in data:
        env_seed = _seed_from_env()
        if env_seed is not None:
            overrides["seed"] = env_seed
    if invocation.trials is not None:
        overrides["trials"] = invocation.trials
    if invocation.algos is not None:
        roster = tuple(part.strip() for part in invocation.algos.split(",") if part.strip())
        overrides["algorithms"] = roster
    return data, overrides


def _resolve_threads(threads: int) -> int:
    if threads < 0:
        raise ConfigError(f"--threads must be non-negative, got {threads}")
    if threads == 0:
        return os.cpu_count() or 1
    return threads


def _run_remote(
    server: str, subcommand: str, merged: dict[str, Any], workers: int
) -> tuple[str, dict[str, Any]]:
    import httpx

    url = server.rstrip("/") + "/" + subcommand
    body = dict(merged)
    body["workers"] = workers
    try:
        response = httpx.post(url, json=body, timeout=600.0)
    except httpx.HTTPError as exc:
        raise ConfigError(f"cannot reach server {url}: {exc}") from exc
    if response.status_code == 422:
        raise AllTrialsDegenerateError(str(response.json().get("detail")))
    if response.status_code != 200:
        try:
            detail = response.json().get("detail")
        except ValueError:
            detail = response.text
        raise ConfigError(f"server answered {response.status_code}: {detail}")
    payload = response.json()
    summary = {
        key: payload[key] for key in ("kind", "sweep_var", "master_seed", "config", "rows")
    }
    return payload["csv"], summary


def _note(verbose: bool, message: str) -> None:
    if verbose:
        print(message, file=sys.stderr)


def execute(invocation: CliInvocation) -> int:
    """Run one invocation end to end; returns the process exit code."""
    try:
        data, overrides = _merge_inputs(invocation)
        config = resolve_config(data, overrides)
        workers = _resolve_threads(invocation.threads)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

    _note(invocation.verbose, f"configuration: {json.dumps(asdict(config))}")
    _note(invocation.verbose, f"workers: {workers}")
    started = time.perf_counter()

    try:
        if invocation.server is not None:
            merged = {**data, **overrides}
            csv_text, summary = _run_remote(
                invocation.server, invocation.subcommand, merged, workers
            )
        else:
            table = run_experiment(config, invocation.subcommand, workers=workers)
            csv_text = render_csv(table)
            summary = summary_dict(table)
    except AllTrialsDegenerateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: cannot reach server: {exc}", file=sys.stderr)
        return 1

    _note(invocation.verbose, f"run finished in {time.perf_counter() - started:.3f}s")

    out_dir = Path(invocation.out_dir)
    stamp = datetime.now().strftime("%Y%m%d-%H%M%S-%f")
    csv_path = out_dir / f"{invocation.subcommand}_{stamp}.csv"
    json_path = out_dir / f"{invocation.subcommand}_{stamp}.json"
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(csv_text)
        json_path.write_text(json.dumps(summary, indent=2) + "\n")
    except OSError as exc:
        print(f"error: cannot write results to {out_dir}: {exc}", file=sys.stderr)
        return 1

    rows = summary["rows"]
    print(f"master seed: {summary['master_seed']}")
    print(f"rows: {len(rows)}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    try:
        invocation = parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 1
        # argparse reserves nonzero for usage problems; map them onto the
        # config-error exit code so 2 stays reserved for degenerate runs.
        return 0 if code == 0 else 1
    return execute(invocation)


def entry() -> None:
    sys.exit(main())
