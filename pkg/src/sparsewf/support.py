"""Support estimation from intensity-weighted column energies."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SupportScores:
    scores: np.ndarray
    m_used: int


def support_scores(A, y) -> SupportScores:
    """Per-coordinate statistic ``E_j = (1/m) sum_i y_i a_ij**2``.

    For Gaussian sensing vectors ``E[E_j] = ||x||**2 + 2 x_j**2``, so the
    coordinates on the support of x stand out once m is large enough.
    Negative (noisy) intensities enter the sum unchanged.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2 or y.ndim != 1 or A.shape[0] != y.size:
        raise ValueError(f"shape mismatch: A {A.shape}, y {y.shape}")
    m = y.size
    if m == 0:
        raise ValueError("need at least one measurement")
    return SupportScores(y @ (A * A) / m, m)


def _top_k(values: np.ndarray, k: int) -> np.ndarray:
    # stable sort on the negated key keeps the lowest index first among ties
    return np.sort(np.argsort(-values, kind="stable")[:k])


def top_k_indices(scores, k: int) -> np.ndarray:
    """Sorted indices of the `k` largest scores, ties going to the lower index."""
    values = scores.scores if isinstance(scores, SupportScores) else np.asarray(scores, dtype=float)
    n = values.size
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    return _top_k(values, k)
