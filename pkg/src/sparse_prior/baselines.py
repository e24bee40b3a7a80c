"""Greedy pursuit baselines and the oracle least-squares bound.

Orthogonal matching pursuit grows the support one index per step: it picks
the column best correlated with the current residual, then re-fits the
estimate by least squares on all indices chosen so far. The weighted variant
adds ``alpha * log(p)`` to each column's correlation score, favoring indices
the activation prior considers likely; with a uniform prior the added term is
constant and the selection order is unchanged.

The oracle solver is handed the true support and simply least-squares fits on
those columns. Its error reflects only noise in the measurement, which makes
it a floor no support-searching method can beat on average.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Problem
from .thresholding import Support

__all__ = [
    "BaselineConfig",
    "GreedyTraceEntry",
    "GreedyResult",
    "recover_omp",
    "recover_lw_omp",
    "recover_oracle",
]


@dataclass(frozen=True)
class BaselineConfig:
    """Knobs for the pursuit baselines.

    ``lw_alpha`` is the absolute weight of the log-prior term in the weighted
    variant; ``None`` derives it as ``alpha_scale / sum(p)``, the same rule
    the iterative solvers use. ``prob_floor`` clamps probabilities away from
    zero before the logarithm.
    """

    lw_alpha: float | None = None
    alpha_scale: float = 1.5
    prob_floor: float = 1e-6

    def __post_init__(self) -> None:
        if self.lw_alpha is not None and self.lw_alpha < 0.0:
            raise ValueError(f"lw_alpha: must be non-negative, got {self.lw_alpha}")
        if self.alpha_scale < 0.0:
            raise ValueError(f"alpha_scale: must be non-negative, got {self.alpha_scale}")
        if not 0.0 < self.prob_floor <= 1.0:
            raise ValueError(f"prob_floor: must lie in (0, 1], got {self.prob_floor}")


@dataclass(frozen=True)
class GreedyTraceEntry:
    """State after one greedy step: the index added and the refit result."""

    picked: int
    objective: float
    support: Support


@dataclass(frozen=True)
class GreedyResult:
    """Estimate from a pursuit run, with one trace entry per selected index."""

    estimate: np.ndarray
    support: Support
    trace: tuple[GreedyTraceEntry, ...]
    flag: str | None = None

    @property
    def iterations_used(self) -> int:
        return len(self.trace)


def _least_squares(a: np.ndarray, y: np.ndarray, idx: np.ndarray) -> tuple[np.ndarray, bool]:
    """Fit y on the chosen columns; returns (full-length estimate, full rank?)."""
    coef, _, rank, _ = np.linalg.lstsq(a[:, idx], y, rcond=None)
    x = np.zeros(a.shape[1])
    x[idx] = coef
    return x, rank == idx.size


def _pursuit(problem: Problem, config: BaselineConfig, weighted: bool) -> GreedyResult:
    a = problem.matrix
    y = problem.measurement
    k = problem.sparsity
    m = a.shape[0]
    if k > m:
        raise ValueError(
            f"pursuit needs sparsity <= m for the least-squares refits, got {k} > {m}"
        )

    col_norms = np.sqrt((a * a).sum(axis=0))
    dead = col_norms == 0.0
    safe_norms = np.where(dead, 1.0, col_norms)

    if weighted:
        p = problem.priors.p
        if config.prob_floor > p.min():
            raise ValueError(
                f"prob_floor {config.prob_floor} exceeds the smallest prior {p.min()}; "
                "the floor must not distort given probabilities"
            )
        alpha = (
            config.lw_alpha
            if config.lw_alpha is not None
            else config.alpha_scale / float(p.sum())
        )
        bias = alpha * np.log(np.maximum(p, config.prob_floor))
    else:
        bias = np.zeros(a.shape[1])

    flag: str | None = None
    trace: list[GreedyTraceEntry] = []
    selected: list[int] = []
    x = np.zeros(a.shape[1])
    residual = y.copy()

    for _ in range(k):
        if float(residual @ residual) == 0.0:
            break
        scores = np.abs(a.T @ residual) / safe_norms + bias
        scores[dead] = -np.inf
        if selected:
            scores[selected] = -np.inf
        picked = int(np.argmax(scores))
        selected.append(picked)
        idx = np.array(sorted(selected), dtype=np.intp)
        x, full_rank = _least_squares(a, y, idx)
        if not full_rank:
            flag = "rank-deficient least-squares refit"
        residual = y - a @ x
        trace.append(
            GreedyTraceEntry(
                picked=picked,
                objective=float(residual @ residual),
                support=Support(tuple(int(i) for i in idx)),
            )
        )

    support = Support(tuple(sorted(selected)))
    return GreedyResult(estimate=x, support=support, trace=tuple(trace), flag=flag)


def recover_omp(problem: Problem, config: BaselineConfig | None = None) -> GreedyResult:
    """Orthogonal matching pursuit with magnitude-correlation selection."""
    return _pursuit(problem, config or BaselineConfig(), weighted=False)


def recover_lw_omp(problem: Problem, config: BaselineConfig | None = None) -> GreedyResult:
    """Pursuit with log-prior weighted selection scores."""
    return _pursuit(problem, config or BaselineConfig(), weighted=True)


def recover_oracle(problem: Problem, true_support: Support) -> GreedyResult:
    """Least-squares fit on the true support (support search skipped).

    Raises ``ValueError`` when the support is empty or larger than the number
    of measurements, since the restricted fit would be underdetermined.
    """
    if len(true_support) == 0:
        raise ValueError("oracle fit needs a non-empty support")
    m = problem.matrix.shape[0]
    if len(true_support) > m:
        raise ValueError(
            f"oracle fit needs |support| <= m, got {len(true_support)} > {m}"
        )
    idx = true_support.to_array()
    x, full_rank = _least_squares(problem.matrix, problem.measurement, idx)
    residual = problem.measurement - problem.matrix @ x
    flag = None if full_rank else "rank-deficient least-squares fit"
    entry = GreedyTraceEntry(
        picked=-1, objective=float(residual @ residual), support=true_support
    )
    return GreedyResult(estimate=x, support=true_support, trace=(entry,), flag=flag)
