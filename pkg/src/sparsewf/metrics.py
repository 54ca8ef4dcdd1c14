"""Error measures that quotient out the global sign."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SUCCESS_NMSE = 1e-5


@dataclass(frozen=True)
class TrialOutcome:
    nmse: float
    success: bool
    iterations: int
    wall_time_s: float
    seed: int


def _pair(z, x):
    z = np.asarray(z, dtype=float)
    x = np.asarray(x, dtype=float)
    if z.shape != x.shape:
        raise ValueError(f"length mismatch: {z.shape} vs {x.shape}")
    return z, x


def dist(z, x) -> float:
    """``min(||z - x||, ||z + x||)``."""
    z, x = _pair(z, x)
    return float(min(np.linalg.norm(z - x), np.linalg.norm(z + x)))


def nmse(xhat, x) -> float:
    """Sign-aligned relative error ``dist(xhat, x) / ||x||``."""
    xhat, x = _pair(xhat, x)
    norm = np.linalg.norm(x)
    if norm == 0:
        raise ValueError("ground truth is the zero vector")
    return dist(xhat, x) / float(norm)


def classify_success(nmse_value: float) -> bool:
    return bool(nmse_value < SUCCESS_NMSE)
