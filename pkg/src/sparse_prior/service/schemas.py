"""Request and response bodies of the benchmark service.

A request mirrors the experiment configuration: every field is optional and
omitted fields take the configuration defaults, so ``{}`` runs the stock
benchmark. ``workers`` controls process parallelism for the one request and
is not part of the configuration echo.
"""

from __future__ import annotations

import math
from dataclasses import asdict

from pydantic import BaseModel, ConfigDict, Field

from ..bench import SweepRow, SweepTable

__all__ = [
    "ExperimentRequest",
    "SweepRowModel",
    "RunResponse",
    "HealthResponse",
]


class ExperimentRequest(BaseModel):
    """Overrides for one benchmark run; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    n: int | None = None
    trials: int | None = None
    group_sizes: list[int] | None = None
    group_probs: list[float] | None = None
    noise_variance: float | None = None
    m: int | None = None
    m_values: list[int] | None = None
    sigma_values: list[float] | None = None
    max_iters: int | None = None
    alpha_scale: float | None = None
    beta: float | None = None
    c: float | None = None
    kappa_scaled: float | None = None
    prob_floor: float | None = None
    alpha_mode: str | None = None
    residual_tol: float | None = None
    lw_alpha: float | None = None
    matrix_variance: float | None = None
    algorithms: list[str] | None = None
    seed: int | None = None
    workers: int = Field(default=1, ge=1)

    def config_overrides(self) -> dict:
        """The explicitly set configuration fields, ``workers`` excluded."""
        return self.model_dump(exclude_none=True, exclude={"workers"})


def _clean(value: float) -> float | None:
    return value if math.isfinite(value) else None


class SweepRowModel(BaseModel):
    """One aggregated result cell; non-finite scores are sent as null.

    The ``csv`` field of the enclosing response keeps the exact textual
    rendering, including any ``nan`` or ``-inf`` cells.
    """

    sweep_var: str
    algorithm: str
    value: float
    p_recovered: float | None
    p_recovered_se: float | None
    msd: float | None
    msd_db: float | None
    msd_se: float | None
    trials: int

    @classmethod
    def from_row(cls, row: SweepRow) -> "SweepRowModel":
        return cls(
            sweep_var=row.sweep_var,
            algorithm=row.algorithm,
            value=row.value,
            p_recovered=_clean(row.p_recovered),
            p_recovered_se=_clean(row.p_recovered_se),
            msd=_clean(row.msd),
            msd_db=_clean(row.msd_db),
            msd_se=_clean(row.msd_se),
            trials=row.trials,
        )


class RunResponse(BaseModel):
    """Complete result of one run: rows, canonical CSV, configuration echo."""

    kind: str
    sweep_var: str
    master_seed: int
    rows: list[SweepRowModel]
    csv: str
    config: dict

    @classmethod
    def from_table(cls, table: SweepTable, csv_text: str) -> "RunResponse":
        return cls(
            kind=table.kind,
            sweep_var=table.sweep_var,
            master_seed=table.master_seed,
            rows=[SweepRowModel.from_row(row) for row in table.rows],
            csv=csv_text,
            config=asdict(table.config),
        )


class HealthResponse(BaseModel):
    status: str
    version: str
