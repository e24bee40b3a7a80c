"""Sparse recovery with activation priors, plus a Monte Carlo benchmark.

The package recovers a K-sparse vector x from noisy linear measurements
``y = A x + e`` and studies how per-index activation probabilities, known
ahead of recovery, improve the estimate. It ships:

* three iterative hard-thresholding solvers (plain, prior-aided, and
  recursive prior-aided) sharing one adaptive-step engine
  (:mod:`~sparse_prior.solvers`);
* greedy pursuit baselines with and without prior weighting, and the oracle
  least-squares bound (:mod:`~sparse_prior.baselines`);
* a reproducible benchmark harness with measurement-count and noise sweeps,
  per-iteration convergence curves, CSV/JSON output, and deterministic
  parallelism (:mod:`~sparse_prior.bench`);
* a command-line front end (``sparse-prior``) and an HTTP service exposing
  the same runs (:mod:`~sparse_prior.cli`, :mod:`~sparse_prior.service`).
"""

from .baselines import (
    BaselineConfig,
    GreedyResult,
    GreedyTraceEntry,
    recover_lw_omp,
    recover_omp,
    recover_oracle,
)
from .bench import (
    ALGORITHM_NAMES,
    AllTrialsDegenerateError,
    ExperimentConfig,
    SweepRow,
    SweepTable,
    msd,
    p_recovered,
    render_csv,
    run_convergence,
    run_experiment,
    run_single,
    run_sweep,
    run_trial,
    summary_dict,
)
from .config import ConfigError, load_config, resolve_config
from .model import (
    PriorModel,
    Problem,
    SparseSignal,
    expand_priors,
    generate_matrix,
    generate_signal,
    make_rng,
    measure,
    trial_rng,
)
from .solvers import (
    DegenerateStepError,
    RecoveryResult,
    SolverConfig,
    TraceEntry,
    recover_ka_niht,
    recover_niht,
    recover_rka_niht,
    step_size,
)
from .thresholding import Support, hard_threshold, restrict, weighted_select

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "Support",
    "hard_threshold",
    "weighted_select",
    "restrict",
    "PriorModel",
    "SparseSignal",
    "Problem",
    "expand_priors",
    "generate_signal",
    "generate_matrix",
    "measure",
    "make_rng",
    "trial_rng",
    "SolverConfig",
    "TraceEntry",
    "RecoveryResult",
    "DegenerateStepError",
    "step_size",
    "recover_niht",
    "recover_ka_niht",
    "recover_rka_niht",
    "BaselineConfig",
    "GreedyTraceEntry",
    "GreedyResult",
    "recover_omp",
    "recover_lw_omp",
    "recover_oracle",
    "ALGORITHM_NAMES",
    "ExperimentConfig",
    "SweepRow",
    "SweepTable",
    "AllTrialsDegenerateError",
    "p_recovered",
    "msd",
    "run_trial",
    "run_sweep",
    "run_convergence",
    "run_single",
    "run_experiment",
    "render_csv",
    "summary_dict",
    "ConfigError",
    "load_config",
    "resolve_config",
]
