"""Truncated spectral initialization restricted to an estimated support."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class InitResult:
    """Initial estimate z0 and how it was built.

    Attributes
    ----------
    z0 : ndarray, shape (n,)
        Initial point, zero outside `support_used`, with ``||z0|| == phi``.
    phi : float
        Square root of the mean intensity.
    support_used : ndarray of int
    power_iters_run : int
    kept_fraction : float
        Fraction of measurements that survive truncation.
    """

    z0: np.ndarray
    phi: float
    support_used: np.ndarray
    power_iters_run: int
    kept_fraction: float


def phi_squared(y) -> float:
    """Mean intensity, clamped at zero."""
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise ValueError("need at least one measurement")
    return max(float(np.mean(y)), 0.0)


def truncation_mask(y, alpha_y: float) -> np.ndarray:
    """Boolean mask of measurements with ``|y_i| <= alpha_y**2 * phi**2``."""
    if not alpha_y > 0:
        raise ValueError(f"alpha_y must be positive, got {alpha_y}")
    y = np.asarray(y, dtype=float)
    return np.abs(y) <= alpha_y**2 * phi_squared(y)


def build_truncated_matrix(A, y, S0, alpha_y: float = 3.0) -> np.ndarray:
    """Weighted covariance ``(1/m) sum_i y_i a_iS a_iS^T`` over untruncated rows.

    ``a_iS`` is row i of `A` restricted to the columns in `S0`. Rows whose
    intensity exceeds ``alpha_y**2`` times the mean intensity in absolute
    value are dropped; ``1/m`` still counts all rows.
    """
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    S0 = np.asarray(S0, dtype=np.intp)
    if S0.size == 0:
        raise ValueError("support S0 is empty")
    if A.ndim != 2 or y.ndim != 1 or A.shape[0] != y.size:
        raise ValueError(f"shape mismatch: A {A.shape}, y {y.shape}")
    m = y.size
    weights = np.where(truncation_mask(y, alpha_y), y, 0.0) / m
    As = A[:, S0]
    Y = As.T @ (weights[:, None] * As)
    return 0.5 * (Y + Y.T)


def power_method(Y, iters: int = 100, rng_seed: int = 0) -> np.ndarray:
    """Unit eigenvector estimate for the largest-magnitude eigenvalue of `Y`.

    Runs exactly `iters` multiplications from a Gaussian start vector and
    flips the sign so the largest-magnitude component is positive.
    """
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != Y.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {Y.shape}")
    d = Y.shape[0]
    if d == 0:
        raise ValueError("empty matrix")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    v = np.random.default_rng(rng_seed).standard_normal(d)
    v /= np.linalg.norm(v)
    for _ in range(iters):
        w = Y @ v
        norm = np.linalg.norm(w)
        if norm == 0:
            # v lies in the null space; no direction is preferred
            break
        v = w / norm
    if v[np.argmax(np.abs(v))] < 0:
        v = -v
    return v


def assemble_initial(z0_S0, S0, phi: float, n: int) -> np.ndarray:
    """Embed ``phi * z0_S0 / ||z0_S0||`` into a length-n vector supported on S0."""
    z0_S0 = np.asarray(z0_S0, dtype=float)
    S0 = np.asarray(S0, dtype=np.intp)
    if z0_S0.shape != S0.shape:
        raise ValueError(f"{z0_S0.size} values for {S0.size} support indices")
    if S0.size and (S0.min() < 0 or S0.max() >= n):
        raise ValueError("support index out of range")
    if phi < 0:
        raise ValueError("phi must be nonnegative")
    z = np.zeros(n)
    if phi == 0:
        return z
    norm = np.linalg.norm(z0_S0)
    if norm == 0:
        raise ValueError("cannot scale a zero direction to a positive norm")
    z[S0] = phi * z0_S0 / norm
    return z


def truncated_spectral_init(A, y, S0, alpha_y: float = 3.0, power_iters: int = 100,
                            rng_seed: int = 0) -> InitResult:
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    S0 = np.sort(np.asarray(S0, dtype=np.intp))
    phi = math.sqrt(phi_squared(y))
    Y = build_truncated_matrix(A, y, S0, alpha_y)
    direction = power_method(Y, power_iters, rng_seed)
    z0 = assemble_initial(direction, S0, phi, A.shape[1])
    kept = float(np.mean(truncation_mask(y, alpha_y)))
    return InitResult(z0, phi, S0, power_iters, kept)
