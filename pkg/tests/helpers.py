"""Independent oracles and instance builders shared by the test modules.

Everything here recomputes expected values by a different route than the
library code: exhaustive subset enumeration for selections, numeric line
search for step sizes, and a separately written iteration loop for the plain
solver. Agreement between the two routes is the evidence the tests rely on.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from sparse_prior.model import Problem, expand_priors
from sparse_prior.thresholding import Support


def exhaustive_top_k(score: np.ndarray, k: int) -> tuple[int, ...]:
    """Best size-k index set by total score, via full enumeration.

    Sums use ``math.fsum`` so that subsets holding the same multiset of
    scores total to identical floats no matter the summation order. Ties
    then resolve to the lexicographically smallest index set, because
    ``itertools.combinations`` yields sets in that order and only a strictly
    better sum replaces the incumbent.
    """
    n = score.size
    k = min(k, n)
    if k == 0:
        return ()
    best = None
    best_sum = -math.inf
    for subset in itertools.combinations(range(n), k):
        total = math.fsum(float(score[i]) for i in subset)
        if total > best_sum:
            best_sum = total
            best = subset
    return best


def exhaustive_best_subset(values: np.ndarray, k: int) -> tuple[int, ...]:
    """Support of the best k-term approximation, via full enumeration.

    Minimizing ``||v - v_S||^2`` over size-k sets S is the same as maximizing
    the retained energy, so this reduces to top-k on squared magnitudes.
    """
    return exhaustive_top_k(np.asarray(values, dtype=float) ** 2, k)


def numeric_step_minimizer(
    matrix: np.ndarray,
    measurement: np.ndarray,
    iterate: np.ndarray,
    support: Support,
) -> float:
    """Line-search oracle for the adaptive step size.

    Minimizes ``phi(t) = ||y - A (x + t * g|_S)||^2`` from black-box
    evaluations of ``phi`` alone, where g is the residual gradient
    ``A.T (y - A x)``. A least-squares objective is an exact parabola along
    any fixed direction, so three samples determine it; the probe spacing is
    rebalanced once so the curvature term is comparable to the value scale,
    which keeps the fitted minimizer accurate even when the parabola is very
    shallow.
    """
    gradient = matrix.T @ (measurement - matrix @ iterate)
    idx = support.to_array()
    direction = np.zeros(matrix.shape[1])
    direction[idx] = gradient[idx]
    base_residual = measurement - matrix @ iterate
    step_image = matrix @ direction

    def phi(t: float) -> float:
        r = base_residual - t * step_image
        return float(r @ r)

    def fit(h: float) -> tuple[float, float]:
        lo, mid, hi = phi(-h), phi(0.0), phi(h)
        curvature = (lo + hi - 2.0 * mid) / (2.0 * h * h)
        slope = (hi - lo) / (2.0 * h)
        return curvature, slope

    curvature, _ = fit(1.0)
    if curvature <= 0.0:
        raise ValueError("objective is not strictly convex along the direction")
    spacing = max(1.0, math.sqrt(max(phi(0.0), 1e-300) / curvature))
    curvature, slope = fit(spacing)
    return -slope / (2.0 * curvature)


def reference_niht(
    matrix: np.ndarray,
    measurement: np.ndarray,
    sparsity: int,
    iterations: int,
    c: float = 0.01,
    kappa_scaled: float = 2.0,
):
    """Separately written plain-solver loop used as a trajectory oracle.

    Yields ``(iterate, support_indices)`` after the initialization and after
    each iteration. Selection breaks ties toward lower indices via a stable
    sort on negated magnitudes.
    """
    a = matrix
    y = measurement
    n = a.shape[1]

    def select(v: np.ndarray) -> np.ndarray:
        order = np.argsort(-np.abs(v), kind="stable")
        return np.sort(order[: min(sparsity, n)])

    def restrict(v: np.ndarray, idx: np.ndarray) -> np.ndarray:
        out = np.zeros(n)
        out[idx] = v[idx]
        return out

    z = a.T @ y
    supp = select(z)
    x = restrict(z, supp)
    yield x.copy(), supp.copy()

    for _ in range(iterations):
        g = a.T @ (y - a @ x)
        gs = g[supp]
        denom = np.linalg.norm(a[:, supp] @ gs) ** 2
        if gs @ gs == 0.0 or denom == 0.0:
            return
        mu = float(gs @ gs) / float(denom)
        v = x + mu * g
        supp_new = select(v)
        cand = restrict(v, supp_new)
        if not np.array_equal(supp_new, supp):
            while True:
                diff = cand - x
                dd = float(diff @ diff)
                if dd == 0.0:
                    break
                add = float(np.linalg.norm(a @ diff) ** 2)
                if add == 0.0:
                    break
                rho = (1.0 - c) * dd / add
                if mu <= rho:
                    break
                mu = mu / kappa_scaled
                v = x + mu * g
                supp_new = select(v)
                cand = restrict(v, supp_new)
                if np.array_equal(supp_new, supp):
                    break
        x, supp = cand, supp_new
        yield x.copy(), supp.copy()


def random_problem(
    rng: np.random.Generator,
    m: int = 24,
    n: int = 48,
    sparsity: int = 4,
    noise_variance: float = 1e-4,
    group_count: int = 3,
) -> Problem:
    """Small generic recovery instance with a random non-uniform prior."""
    sizes = []
    remaining = n
    for i in range(group_count - 1):
        s = int(rng.integers(1, remaining - (group_count - 1 - i) + 1))
        sizes.append(s)
        remaining -= s
    sizes.append(remaining)
    probs = rng.uniform(0.05, 0.9, size=group_count)
    priors = expand_priors(sizes, probs)

    x = np.zeros(n)
    idx = rng.choice(n, size=sparsity, replace=False)
    x[idx] = rng.standard_normal(sparsity)
    a = rng.standard_normal((m, n)) / math.sqrt(m)
    y = a @ x
    if noise_variance > 0.0:
        y = y + rng.standard_normal(m) * math.sqrt(noise_variance)
    return Problem(
        matrix=a,
        measurement=y,
        noise_variance=noise_variance,
        sparsity=sparsity,
        priors=priors,
    )
