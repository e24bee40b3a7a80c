"""Problem data types and deterministic generators for recovery benchmarks.

Signals follow a per-index Bernoulli support model: index i is active with
probability p_i and carries a standard-normal amplitude. The probability
vector is laid out group by group, every index inside a group sharing the
group's activation probability, so the expected sparsity is
``sum(group_sizes[j] * group_probs[j])``.

Randomness policy
-----------------
All draws go through :class:`numpy.random.Generator` instances backed by the
Philox counter-based bit generator, whose streams are stable across platforms
and numpy releases. Benchmark trials derive independent sub-streams from
``SeedSequence([master_seed, m, bits(sigma2), trial_index])`` where ``bits``
is the little-endian IEEE-754 encoding of the noise variance; the derivation
depends only on those four values, never on execution order.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .thresholding import Support

__all__ = [
    "PriorModel",
    "SparseSignal",
    "Problem",
    "expand_priors",
    "generate_signal",
    "generate_matrix",
    "measure",
    "make_rng",
    "trial_rng",
]


def make_rng(seed: int) -> np.random.Generator:
    """Deterministic generator for a 64-bit seed (Philox stream)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))


def _float_entropy(value: float) -> int:
    """Unsigned 64-bit IEEE-754 bit pattern of a float, for seed derivation."""
    return struct.unpack("<Q", struct.pack("<d", float(value)))[0]


def trial_rng(master_seed: int, m: int, sigma2: float, trial_index: int) -> np.random.Generator:
    """Independent per-trial generator, insensitive to trial execution order."""
    seq = np.random.SeedSequence(
        [int(master_seed), int(m), _float_entropy(sigma2), int(trial_index)]
    )
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class PriorModel:
    """Per-index activation probabilities with their group structure.

    ``p`` has length ``sum(group_sizes)`` and repeats each group probability
    across that group's block of indices. Build instances via
    :func:`expand_priors`, which validates the inputs.
    """

    group_sizes: tuple[int, ...]
    group_probs: tuple[float, ...]
    p: np.ndarray

    @property
    def n(self) -> int:
        return self.p.size

    @property
    def expected_sparsity(self) -> float:
        return float(self.p.sum())


def expand_priors(group_sizes: Sequence[int], group_probs: Sequence[float]) -> PriorModel:
    """Expand group sizes and probabilities into a per-index prior vector.

    Raises ``ValueError`` for empty or mismatched lists, non-positive sizes,
    or probabilities outside (0, 1].
    """
    sizes = tuple(int(s) for s in group_sizes)
    probs = tuple(float(q) for q in group_probs)
    if len(sizes) == 0 or len(sizes) != len(probs):
        raise ValueError(
            f"group_sizes and group_probs must be non-empty and equally long, "
            f"got lengths {len(sizes)} and {len(probs)}"
        )
    if any(s < 1 for s in sizes):
        raise ValueError(f"group sizes must be positive, got {sizes}")
    if any(not 0.0 < q <= 1.0 for q in probs):
        raise ValueError(f"group probabilities must lie in (0, 1], got {probs}")
    p = np.repeat(np.asarray(probs, dtype=float), sizes)
    p.setflags(write=False)
    return PriorModel(group_sizes=sizes, group_probs=probs, p=p)


@dataclass(frozen=True)
class SparseSignal:
    """Ground-truth sparse vector with its support and generation pieces.

    ``values[i] == weights[i] * indicator[i]`` holds for every index, and the
    support lists exactly the indices with ``indicator[i] == 1``.
    """

    values: np.ndarray
    support: Support
    weights: np.ndarray
    indicator: np.ndarray


def generate_signal(priors: PriorModel, rng: np.random.Generator) -> SparseSignal:
    """Draw a sparse signal from the Bernoulli-support model.

    Each index is activated independently with its prior probability and every
    amplitude is standard normal. Amplitudes that come out exactly zero are
    redrawn (probability-zero event) so the nonzero count always equals the
    support size; a draw with an empty support is discarded and repeated in
    full, fresh indicators and amplitudes alike.
    """
    p = priors.p
    while True:
        indicator = (rng.random(p.size) < p).astype(np.uint8)
        weights = rng.standard_normal(p.size)
        while True:
            zero = weights == 0.0
            if not zero.any():
                break
            weights[zero] = rng.standard_normal(int(zero.sum()))
        if indicator.any():
            break
    values = weights * indicator
    for arr in (values, weights, indicator):
        arr.setflags(write=False)
    support = Support(tuple(int(i) for i in np.flatnonzero(indicator)))
    return SparseSignal(values=values, support=support, weights=weights, indicator=indicator)


def generate_matrix(
    m: int,
    n: int,
    rng: np.random.Generator,
    entry_variance: float | None = None,
) -> np.ndarray:
    """Gaussian sensing matrix with i.i.d. N(0, 1/m) entries.

    The 1/m entry variance gives every column unit expected squared norm,
    which keeps the adaptive step size of the iterative solvers well scaled.
    Pass ``entry_variance`` to override the default.
    """
    m = int(m)
    n = int(n)
    if m < 1 or n < 1:
        raise ValueError(f"matrix dimensions must be positive, got {m}x{n}")
    if m > n:
        raise ValueError(f"row count m={m} must not exceed column count n={n}")
    var = 1.0 / m if entry_variance is None else float(entry_variance)
    if var <= 0.0:
        raise ValueError(f"entry variance must be positive, got {var}")
    a = rng.standard_normal((m, n)) * np.sqrt(var)
    a.setflags(write=False)
    return a


def measure(
    matrix: np.ndarray,
    signal: SparseSignal,
    noise_variance: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Noisy linear measurement ``A @ x + e`` with i.i.d. Gaussian noise.

    ``noise_variance == 0`` returns the exact product and consumes no random
    draws.
    """
    matrix = np.asarray(matrix, dtype=float)
    if matrix.ndim != 2 or matrix.shape[1] != signal.values.size:
        raise ValueError(
            f"matrix shape {matrix.shape} does not match signal length {signal.values.size}"
        )
    if noise_variance < 0.0:
        raise ValueError(f"noise variance must be non-negative, got {noise_variance}")
    y = matrix @ signal.values
    if noise_variance > 0.0:
        y = y + rng.standard_normal(matrix.shape[0]) * np.sqrt(noise_variance)
    y.setflags(write=False)
    return y


@dataclass(frozen=True)
class Problem:
    """One recovery instance: sensing matrix, measurement, and side knowledge."""

    matrix: np.ndarray
    measurement: np.ndarray
    noise_variance: float
    sparsity: int
    priors: PriorModel

    def __post_init__(self) -> None:
        m, n = self.matrix.shape
        if m > n:
            raise ValueError(f"matrix must have m <= n, got {m}x{n}")
        if self.measurement.size != m:
            raise ValueError(
                f"measurement length {self.measurement.size} does not match row count {m}"
            )
        if not 1 <= self.sparsity <= n:
            raise ValueError(f"sparsity must lie in [1, {n}], got {self.sparsity}")
        if self.priors.n != n:
            raise ValueError(
                f"prior vector length {self.priors.n} does not match column count {n}"
            )
        if self.noise_variance < 0.0:
            raise ValueError(f"noise variance must be non-negative, got {self.noise_variance}")
