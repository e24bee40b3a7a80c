"""Support-selection primitives shared by every recovery algorithm.

``hard_threshold`` keeps the k entries of largest magnitude; ``weighted_select``
ranks entries by magnitude plus an additive per-index penalty (callers pass a
scaled elementwise log of a prior-probability vector). With a zero penalty the
weighted rule reduces exactly to plain hard thresholding. Both resolve ties in
favour of the lower index so that benchmark runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

__all__ = ["Support", "hard_threshold", "weighted_select", "restrict"]


@dataclass(frozen=True)
class Support:
    """Strictly increasing tuple of non-negative indices."""

    indices: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        idx = self.indices
        if idx and idx[0] < 0:
            raise ValueError("support indices must be non-negative")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ValueError("support indices must be strictly increasing")

    @classmethod
    def from_iterable(cls, indices: Iterable[int]) -> "Support":
        """Build a support from any iterable of integers, deduplicating."""
        return cls(tuple(sorted({int(i) for i in indices})))

    def to_array(self) -> np.ndarray:
        return np.asarray(self.indices, dtype=np.intp)

    def intersection_size(self, other: "Support") -> int:
        return len(set(self.indices) & set(other.indices))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, index: object) -> bool:
        return index in self.indices


def _top_k_indices(score: np.ndarray, k: int) -> np.ndarray:
    """Indices of the k largest scores, ties keeping the lowest index.

    Matches a stable descending sort of (score, index) truncated to k, but uses
    a partial partition so only the boundary tie needs explicit handling.
    """
    n = score.size
    if k == 0:
        return np.empty(0, dtype=np.intp)
    if k >= n:
        return np.arange(n, dtype=np.intp)
    part = np.argpartition(-score, k - 1)[:k]
    cut = score[part].min()
    above = np.flatnonzero(score > cut)
    at_cut = np.flatnonzero(score == cut)
    sel = np.concatenate([above, at_cut[: k - above.size]])
    sel.sort()
    return sel


def hard_threshold(v: np.ndarray, k: int) -> tuple[np.ndarray, Support]:
    """Zero all but the k largest-magnitude entries of ``v``.

    Parameters
    ----------
    v : array_like
        Input vector.
    k : int
        Number of entries to keep, ``0 <= k <= len(v)``.

    Returns
    -------
    (out, support)
        ``out`` equals ``v`` on the selected indices and is zero elsewhere;
        ``support`` lists the selected indices. Magnitude ties are broken in
        favour of the lower index.
    """
    v = np.asarray(v, dtype=float)
    if not 0 <= k <= v.size:
        raise ValueError(f"k must lie in [0, {v.size}], got {k}")
    sel = _top_k_indices(np.abs(v), k)
    out = np.zeros_like(v)
    out[sel] = v[sel]
    return out, Support(tuple(int(i) for i in sel))


def weighted_select(v: np.ndarray, penalty: np.ndarray, k: int) -> Support:
    """Select the k indices with the largest ``|v_i| + penalty_i`` score.

    The penalty is an additive bias on the magnitude ranking; callers pass
    ``alpha * log(q)`` for a clamped probability-weight vector ``q``. A
    constant penalty (in particular all zeros) yields the same support as
    ``hard_threshold``. Ties are broken in favour of the lower index.

    Raises
    ------
    ValueError
        If the vectors differ in length, ``k`` is out of range, or the
        penalty contains non-finite entries (a symptom of taking ``log`` of
        an unclamped zero probability upstream).
    """
    v = np.asarray(v, dtype=float)
    penalty = np.asarray(penalty, dtype=float)
    if penalty.shape != v.shape:
        raise ValueError(
            f"penalty length {penalty.size} does not match vector length {v.size}"
        )
    if not np.all(np.isfinite(penalty)):
        raise ValueError("penalty contains non-finite entries; clamp probabilities before log")
    if not 0 <= k <= v.size:
        raise ValueError(f"k must lie in [0, {v.size}], got {k}")
    sel = _top_k_indices(np.abs(v) + penalty, k)
    return Support(tuple(int(i) for i in sel))


def restrict(v: np.ndarray, support: Support) -> np.ndarray:
    """Full-length copy of ``v`` that is zero off the given support."""
    v = np.asarray(v, dtype=float)
    idx = support.to_array()
    if idx.size and idx[-1] >= v.size:
        raise ValueError(f"support index {int(idx[-1])} out of bounds for length {v.size}")
    out = np.zeros_like(v)
    out[idx] = v[idx]
    return out
