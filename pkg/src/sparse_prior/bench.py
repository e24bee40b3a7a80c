"""Monte Carlo benchmark harness for the recovery algorithms.

A benchmark run repeats independent trials of the same pipeline: draw a
sparse signal from the activation prior, draw a Gaussian sensing matrix, form
a noisy measurement, hand the instance to each algorithm in the roster, and
score the results. Two scores are tracked per trial:

* support overlap, ``|true & estimated| / |true|``;
* squared deviation, ``||x - xhat||^2 / ||x||^2``.

Sweeps aggregate the scores over trials into mean and standard error per
(swept value, algorithm) cell. Convergence runs score the iterative solvers
after every accepted iterate instead, producing one row per iteration count.

Every trial seeds its own random stream from the master seed, the measurement
count, the noise variance, and the trial index, so results are identical no
matter how trials are ordered or distributed across worker processes; a rerun
with the same configuration reproduces the output byte for byte.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Sequence

import numpy as np

from .baselines import BaselineConfig, recover_lw_omp, recover_omp, recover_oracle
from .model import Problem, SparseSignal, expand_priors, generate_matrix, generate_signal, measure, trial_rng
from .solvers import SolverConfig, recover_ka_niht, recover_niht, recover_rka_niht
from .thresholding import Support

__all__ = [
    "ALGORITHM_NAMES",
    "ITERATIVE_NAMES",
    "CSV_COLUMNS",
    "ExperimentConfig",
    "AlgorithmMetrics",
    "TrialRecord",
    "SweepRow",
    "SweepTable",
    "AllTrialsDegenerateError",
    "support_overlap",
    "squared_deviation",
    "p_recovered",
    "msd",
    "run_trial",
    "run_sweep",
    "run_convergence",
    "run_single",
    "run_experiment",
    "render_csv",
    "summary_dict",
]

ALGORITHM_NAMES = ("niht", "ka-niht", "rka-niht", "omp", "lw-omp", "oracle")
ITERATIVE_NAMES = ("niht", "ka-niht", "rka-niht")
CSV_COLUMNS = (
    "sweep_var",
    "algorithm",
    "value",
    "p_recovered",
    "p_recovered_se",
    "msd",
    "msd_db",
    "msd_se",
    "trials",
)


class AllTrialsDegenerateError(RuntimeError):
    """Every trial of a run failed; there is nothing to aggregate."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a benchmark run.

    The signal model places ``group_sizes[j]`` indices at activation
    probability ``group_probs[j]``; the defaults give 240 indices with an
    expected sparsity of 16, concentrated in the two small high-probability
    groups. ``m`` and ``noise_variance`` are the operating point for runs
    that do not sweep them; ``m_values`` and ``sigma_values`` are the sweep
    grids. Solver and baseline knobs mirror :class:`SolverConfig` and
    :class:`BaselineConfig`. ``seed`` is the master seed every trial stream
    derives from.
    """

    n: int = 240
    trials: int = 1000
    group_sizes: tuple[int, ...] = (210, 20, 5, 5)
    group_probs: tuple[float, ...] = (4.0 / 210.0, 4.0 / 20.0, 4.0 / 5.0, 4.0 / 5.0)
    noise_variance: float = 1e-3
    m: int = 70
    m_values: tuple[int, ...] = (40, 50, 60, 70, 80)
    sigma_values: tuple[float, ...] = (1e-4, 1e-3, 1e-2, 1e-1)
    max_iters: int = 100
    alpha_scale: float = 1.5
    beta: float = 0.6
    c: float = 0.01
    kappa_scaled: float = 2.0
    prob_floor: float = 1e-6
    alpha_mode: str = "recompute"
    residual_tol: float = 1e-12
    lw_alpha: float | None = None
    matrix_variance: float | None = None
    algorithms: tuple[str, ...] = ALGORITHM_NAMES
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("group_sizes", "group_probs", "m_values", "sigma_values", "algorithms"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if self.n < 1:
            raise ValueError(f"n: must be at least 1, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"trials: must be at least 1, got {self.trials}")
        if sum(self.group_sizes) != self.n:
            raise ValueError(
                f"group_sizes: must sum to n={self.n}, got sum {sum(self.group_sizes)}"
            )
        if not 1 <= self.m <= self.n:
            raise ValueError(f"m: must lie in [1, {self.n}], got {self.m}")
        if len(self.m_values) == 0:
            raise ValueError("m_values: must not be empty")
        for value in self.m_values:
            if not 1 <= value <= self.n:
                raise ValueError(f"m_values: every entry must lie in [1, {self.n}], got {value}")
        if len(self.sigma_values) == 0:
            raise ValueError("sigma_values: must not be empty")
        for value in self.sigma_values:
            if value < 0.0:
                raise ValueError(f"sigma_values: entries must be non-negative, got {value}")
        if self.noise_variance < 0.0:
            raise ValueError(
                f"noise_variance: must be non-negative, got {self.noise_variance}"
            )
        if self.matrix_variance is not None and self.matrix_variance <= 0.0:
            raise ValueError(
                f"matrix_variance: must be positive when set, got {self.matrix_variance}"
            )
        if self.seed < 0:
            raise ValueError(f"seed: must be non-negative, got {self.seed}")
        if len(self.algorithms) == 0:
            raise ValueError("algorithms: roster must not be empty")
        for name in self.algorithms:
            if name not in ALGORITHM_NAMES:
                raise ValueError(
                    f"algorithms: unknown name {name!r}; choose from {ALGORITHM_NAMES}"
                )
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError(f"algorithms: roster has duplicates, got {self.algorithms}")
        # Constructing the per-solver configs validates the shared knobs and
        # surfaces their own error messages.
        self.solver_config()
        self.baseline_config()
        expand_priors(self.group_sizes, self.group_probs)

    def solver_config(self) -> SolverConfig:
        return SolverConfig(
            max_iters=self.max_iters,
            alpha_scale=self.alpha_scale,
            beta=self.beta,
            c=self.c,
            kappa_scaled=self.kappa_scaled,
            prob_floor=self.prob_floor,
            alpha_mode=self.alpha_mode,
            residual_tol=self.residual_tol,
        )

    def baseline_config(self) -> BaselineConfig:
        return BaselineConfig(
            lw_alpha=self.lw_alpha,
            alpha_scale=self.alpha_scale,
            prob_floor=self.prob_floor,
        )


@dataclass(frozen=True)
class AlgorithmMetrics:
    """Per-trial scores for one algorithm; NaN scores mean the run failed."""

    overlap: float
    deviation: float
    iterations: int
    wall_time: float
    flag: str | None = None


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one trial: the drawn sparsity and each algorithm's scores."""

    trial_index: int
    sparsity: int
    metrics: dict[str, AlgorithmMetrics]


@dataclass(frozen=True)
class SweepRow:
    """One aggregated cell: an algorithm at one swept value."""

    sweep_var: str
    algorithm: str
    value: float
    p_recovered: float
    p_recovered_se: float
    msd: float
    msd_db: float
    msd_se: float
    trials: int


@dataclass(frozen=True)
class SweepTable:
    """All rows of one run plus the configuration that produced them."""

    kind: str
    sweep_var: str
    rows: tuple[SweepRow, ...]
    config: ExperimentConfig = field(repr=False)

    @property
    def master_seed(self) -> int:
        return self.config.seed


def support_overlap(true_support: Support, est_support: Support) -> float:
    """Fraction of the true support found: ``|true & est| / |true|``."""
    if len(true_support) == 0:
        raise ValueError("support overlap is undefined for an empty true support")
    return true_support.intersection_size(est_support) / len(true_support)


def squared_deviation(true_values: np.ndarray, estimate: np.ndarray) -> float:
    """Relative squared error ``||x - xhat||^2 / ||x||^2``."""
    true_values = np.asarray(true_values, dtype=float)
    estimate = np.asarray(estimate, dtype=float)
    if true_values.shape != estimate.shape:
        raise ValueError(
            f"shape mismatch: {true_values.shape} vs {estimate.shape}"
        )
    denom = float(true_values @ true_values)
    if denom == 0.0:
        raise ValueError("squared deviation is undefined for an all-zero true signal")
    diff = true_values - estimate
    return float(diff @ diff) / denom


def p_recovered(true_supports: Sequence[Support], est_supports: Sequence[Support]) -> float:
    """Mean support overlap across paired trials."""
    if len(true_supports) != len(est_supports) or len(true_supports) == 0:
        raise ValueError("need equally many (and at least one) true and estimated supports")
    return float(
        np.mean([support_overlap(t, e) for t, e in zip(true_supports, est_supports)])
    )


def msd(true_signals: Sequence[np.ndarray], estimates: Sequence[np.ndarray]) -> float:
    """Mean relative squared deviation across paired trials."""
    if len(true_signals) != len(estimates) or len(true_signals) == 0:
        raise ValueError("need equally many (and at least one) true signals and estimates")
    return float(
        np.mean([squared_deviation(t, e) for t, e in zip(true_signals, estimates)])
    )


_CAUGHT = (ValueError, RuntimeError, ArithmeticError, np.linalg.LinAlgError)


def _draw_instance(
    config: ExperimentConfig, m: int, sigma2: float, trial_index: int
) -> tuple[Problem, SparseSignal]:
    rng = trial_rng(config.seed, m, sigma2, trial_index)
    priors = expand_priors(config.group_sizes, config.group_probs)
    signal = generate_signal(priors, rng)
    matrix = generate_matrix(m, config.n, rng, config.matrix_variance)
    measurement = measure(matrix, signal, sigma2, rng)
    problem = Problem(
        matrix=matrix,
        measurement=measurement,
        noise_variance=sigma2,
        sparsity=len(signal.support),
        priors=priors,
    )
    return problem, signal


def _run_algorithm(name: str, problem: Problem, signal: SparseSignal, config: ExperimentConfig):
    if name == "niht":
        return recover_niht(problem, config.solver_config())
    if name == "ka-niht":
        return recover_ka_niht(problem, config.solver_config())
    if name == "rka-niht":
        return recover_rka_niht(problem, config.solver_config())
    if name == "omp":
        return recover_omp(problem, config.baseline_config())
    if name == "lw-omp":
        return recover_lw_omp(problem, config.baseline_config())
    if name == "oracle":
        return recover_oracle(problem, signal.support)
    raise ValueError(f"unknown algorithm {name!r}")


def run_trial(config: ExperimentConfig, m: int, sigma2: float, trial_index: int) -> TrialRecord:
    """One full trial at an operating point: draw, solve with every roster
    algorithm, score. Failures of a single algorithm are recorded as NaN
    scores with the error message as the flag; they never abort the trial.
    """
    problem, signal = _draw_instance(config, m, sigma2, trial_index)
    metrics: dict[str, AlgorithmMetrics] = {}
    for name in config.algorithms:
        start = time.perf_counter()
        try:
            result = _run_algorithm(name, problem, signal, config)
        except _CAUGHT as exc:
            metrics[name] = AlgorithmMetrics(
                overlap=math.nan,
                deviation=math.nan,
                iterations=0,
                wall_time=time.perf_counter() - start,
                flag=str(exc),
            )
            continue
        elapsed = time.perf_counter() - start
        metrics[name] = AlgorithmMetrics(
            overlap=support_overlap(signal.support, result.support),
            deviation=squared_deviation(signal.values, result.estimate),
            iterations=result.iterations_used,
            wall_time=elapsed,
            flag=result.flag,
        )
    return TrialRecord(trial_index=trial_index, sparsity=len(signal.support), metrics=metrics)


def _sweep_task(args: tuple[ExperimentConfig, int, float, int]) -> TrialRecord:
    config, m, sigma2, trial_index = args
    return run_trial(config, m, sigma2, trial_index)


def _map_tasks(fn, args_list: list, workers: int) -> list:
    if workers < 1:
        raise ValueError(f"workers: must be at least 1, got {workers}")
    if workers == 1:
        return [fn(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        # executor.map preserves submission order, so aggregation sees the
        # same sequence as a serial run.
        return list(executor.map(fn, args_list))


def _mean_and_se(values: np.ndarray) -> tuple[float, float, int]:
    finite = values[np.isfinite(values)]
    count = finite.size
    if count == 0:
        return math.nan, math.nan, 0
    mean = float(np.mean(finite))
    if count == 1:
        return mean, 0.0, 1
    se = float(np.std(finite, ddof=1) / math.sqrt(count))
    return mean, se, count


def _db(value: float) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(10.0 * np.log10(value))


def _aggregate_cell(
    sweep_var: str,
    algorithm: str,
    value: float,
    overlaps: np.ndarray,
    deviations: np.ndarray,
) -> SweepRow:
    p_mean, p_se, p_count = _mean_and_se(overlaps)
    d_mean, d_se, d_count = _mean_and_se(deviations)
    return SweepRow(
        sweep_var=sweep_var,
        algorithm=algorithm,
        value=float(value),
        p_recovered=p_mean,
        p_recovered_se=p_se,
        msd=d_mean,
        msd_db=_db(d_mean),
        msd_se=d_se,
        trials=min(p_count, d_count),
    )


def run_sweep(config: ExperimentConfig, kind: str, workers: int = 1) -> SweepTable:
    """Sweep the measurement count (``kind="m"``) or the noise variance
    (``kind="noise"``) over the configured grid, aggregating ``trials``
    independent trials per grid point.
    """
    if kind == "m":
        sweep_var = "m"
        values = sorted(set(int(v) for v in config.m_values))
        points = [(v, config.noise_variance) for v in values]
    elif kind == "noise":
        sweep_var = "noise_variance"
        values = sorted(set(float(v) for v in config.sigma_values))
        points = [(config.m, v) for v in values]
    else:
        raise ValueError(f"sweep kind must be 'm' or 'noise', got {kind!r}")

    tasks = [
        (config, m, sigma2, t)
        for (m, sigma2) in points
        for t in range(config.trials)
    ]
    records = _map_tasks(_sweep_task, tasks, workers)

    rows: list[SweepRow] = []
    for i, value in enumerate(values):
        block = records[i * config.trials : (i + 1) * config.trials]
        for name in sorted(config.algorithms):
            overlaps = np.array([r.metrics[name].overlap for r in block])
            deviations = np.array([r.metrics[name].deviation for r in block])
            rows.append(_aggregate_cell(sweep_var, name, float(value), overlaps, deviations))
    if all(row.trials == 0 for row in rows):
        raise AllTrialsDegenerateError(
            "every trial failed for every algorithm; check the configuration"
        )
    kind_name = "sweep-m" if kind == "m" else "sweep-noise"
    return SweepTable(kind=kind_name, sweep_var=sweep_var, rows=tuple(rows), config=config)


def _convergence_trial(
    config: ExperimentConfig, trial_index: int
) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Per-iteration scores of the iterative solvers for one trial.

    Returns, per algorithm, arrays of overlap and deviation at iteration
    counts 1..max_iters. Solvers that stop early hold their final state, so
    the curves stay flat after convergence. A failed run yields NaN arrays.
    """
    problem, signal = _draw_instance(config, config.m, config.noise_variance, trial_index)
    # Early residual-based stops would truncate the curves, so they are
    # disabled; fixed points still freeze the iterate, which fill-forward
    # below represents faithfully.
    run_cfg = replace(config, residual_tol=0.0)
    out: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for name in config.algorithms:
        if name not in ITERATIVE_NAMES:
            continue
        overlaps = np.full(config.max_iters, math.nan)
        deviations = np.full(config.max_iters, math.nan)
        try:
            result = _run_algorithm(name, problem, signal, run_cfg)
        except _CAUGHT:
            out[name] = (overlaps, deviations)
            continue
        trace = result.trace
        for l in range(1, config.max_iters + 1):
            entry = trace[min(l, len(trace) - 1)]
            overlaps[l - 1] = support_overlap(signal.support, entry.support)
            deviations[l - 1] = squared_deviation(signal.values, entry.iterate)
        out[name] = (overlaps, deviations)
    return out


def _convergence_task(args: tuple[ExperimentConfig, int]) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    config, trial_index = args
    return _convergence_trial(config, trial_index)


def run_convergence(config: ExperimentConfig, workers: int = 1) -> SweepTable:
    """Score the iterative solvers after every iterate, at the fixed
    operating point ``(m, noise_variance)``. Rows are keyed by iteration
    count. Non-iterative roster entries are skipped; an all-baseline roster
    is an error.
    """
    roster = [name for name in config.algorithms if name in ITERATIVE_NAMES]
    if not roster:
        raise ValueError(
            "convergence runs need at least one iterative solver in the roster; "
            f"got only {config.algorithms}"
        )
    tasks = [(config, t) for t in range(config.trials)]
    results = _map_tasks(_convergence_task, tasks, workers)

    rows: list[SweepRow] = []
    for l in range(1, config.max_iters + 1):
        for name in sorted(roster):
            overlaps = np.array([res[name][0][l - 1] for res in results])
            deviations = np.array([res[name][1][l - 1] for res in results])
            rows.append(_aggregate_cell("iteration", name, float(l), overlaps, deviations))
    if all(row.trials == 0 for row in rows):
        raise AllTrialsDegenerateError(
            "every trial failed for every algorithm; check the configuration"
        )
    return SweepTable(kind="convergence", sweep_var="iteration", rows=tuple(rows), config=config)


def run_single(config: ExperimentConfig, workers: int = 1) -> SweepTable:
    """One trial at the fixed operating point, one row per algorithm."""
    del workers  # a single trial has nothing to parallelize
    record = run_trial(config, config.m, config.noise_variance, 0)
    rows: list[SweepRow] = []
    for name in sorted(config.algorithms):
        cell = record.metrics[name]
        rows.append(
            _aggregate_cell(
                "m",
                name,
                float(config.m),
                np.array([cell.overlap]),
                np.array([cell.deviation]),
            )
        )
    if all(row.trials == 0 for row in rows):
        raise AllTrialsDegenerateError(
            "every trial failed for every algorithm; check the configuration"
        )
    return SweepTable(kind="single", sweep_var="m", rows=tuple(rows), config=config)


def run_experiment(config: ExperimentConfig, kind: str, workers: int = 1) -> SweepTable:
    """Dispatch a run by kind: sweep-m, sweep-noise, convergence, or single."""
    if kind == "sweep-m":
        return run_sweep(config, "m", workers)
    if kind == "sweep-noise":
        return run_sweep(config, "noise", workers)
    if kind == "convergence":
        return run_convergence(config, workers)
    if kind == "single":
        return run_single(config, workers)
    raise ValueError(
        f"kind must be one of 'sweep-m', 'sweep-noise', 'convergence', 'single', got {kind!r}"
    )


def _format_number(value: float) -> str:
    return format(float(value), ".12g")


def render_csv(table: SweepTable) -> str:
    """Render a table in the fixed column order with 12 significant digits
    and LF line endings; identical tables render to identical bytes.
    """
    lines = [",".join(CSV_COLUMNS)]
    for row in table.rows:
        lines.append(
            ",".join(
                [
                    row.sweep_var,
                    row.algorithm,
                    _format_number(row.value),
                    _format_number(row.p_recovered),
                    _format_number(row.p_recovered_se),
                    _format_number(row.msd),
                    _format_number(row.msd_db),
                    _format_number(row.msd_se),
                    str(int(row.trials)),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def summary_dict(table: SweepTable) -> dict:
    """JSON-ready summary: kind, master seed, configuration echo, and rows.

    Deliberately free of timestamps and host details so reruns serialize
    identically.
    """
    return {
        "kind": table.kind,
        "sweep_var": table.sweep_var,
        "master_seed": table.master_seed,
        "config": asdict(table.config),
        "rows": [asdict(row) for row in table.rows],
    }
