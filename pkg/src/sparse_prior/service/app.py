"""FastAPI application exposing the benchmark harness over HTTP.

Endpoints mirror the command-line subcommands one to one:

* ``POST /sweep-m``, ``POST /sweep-noise``, ``POST /convergence``,
  ``POST /single`` run an experiment and return rows, canonical CSV, and the
  configuration echo;
* ``GET /defaults`` reports the stock configuration;
* ``GET /health`` is a liveness probe.

Invalid configurations answer 400 with the validation message; runs where
every trial fails answer 422.
"""

from __future__ import annotations

from dataclasses import asdict

from fastapi import FastAPI, HTTPException

from ..bench import AllTrialsDegenerateError, ExperimentConfig, render_csv, run_experiment
from ..config import ConfigError, resolve_config
from .schemas import ExperimentRequest, HealthResponse, RunResponse

__all__ = ["app", "create_app"]

_VERSION = "0.1.0"

RUN_KINDS = ("sweep-m", "sweep-noise", "convergence", "single")


def _run(kind: str, request: ExperimentRequest) -> RunResponse:
    try:
        config = resolve_config(request.config_overrides())
    except ConfigError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    try:
        table = run_experiment(config, kind, workers=request.workers)
    except AllTrialsDegenerateError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return RunResponse.from_table(table, render_csv(table))


def create_app() -> FastAPI:
    app = FastAPI(
        title="sparse-prior benchmark service",
        version=_VERSION,
        description="Monte Carlo benchmarks for sparse recovery with activation priors",
    )

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=_VERSION)

    @app.get("/defaults")
    def defaults() -> dict:
        return asdict(ExperimentConfig())

    @app.post("/sweep-m", response_model=RunResponse)
    def sweep_m(request: ExperimentRequest) -> RunResponse:
        return _run("sweep-m", request)

    @app.post("/sweep-noise", response_model=RunResponse)
    def sweep_noise(request: ExperimentRequest) -> RunResponse:
        return _run("sweep-noise", request)

    @app.post("/convergence", response_model=RunResponse)
    def convergence(request: ExperimentRequest) -> RunResponse:
        return _run("convergence", request)

    @app.post("/single", response_model=RunResponse)
    def single(request: ExperimentRequest) -> RunResponse:
        return _run("single", request)

    return app


app = create_app()
