"""Hard-thresholded Wirtinger flow for real sparse phase retrieval.

The solver minimizes the intensity least-squares loss

    f(z) = 1/(2m) * sum_i ((a_i . z)**2 - y_i)**2

over k-sparse z in three stages: support estimation, truncated spectral
initialization on that support, then gradient steps each followed by
projection onto the k largest-magnitude entries.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from sparsewf.metrics import dist
from sparsewf.spectral import InitResult, phi_squared, truncated_spectral_init
from sparsewf.support import _top_k, support_scores, top_k_indices

PAPER_STEP_CAP = 0.1
PAPER_STEP_SCALE = 330.0


@dataclass(frozen=True)
class StepSchedule:
    """Step-size rule: ``"paper"`` ramp or a ``"constant"`` value."""

    kind: str = "paper"
    mu: float = PAPER_STEP_CAP

    def __post_init__(self):
        if self.kind not in ("paper", "constant"):
            raise ValueError(f"unknown step schedule {self.kind!r}")
        if self.kind == "constant" and not self.mu >= 0:
            raise ValueError("constant step must be nonnegative")

    @classmethod
    def paper(cls) -> StepSchedule:
        return cls("paper")

    @classmethod
    def constant(cls, mu: float) -> StepSchedule:
        return cls("constant", float(mu))

    def __str__(self):
        return "paper" if self.kind == "paper" else repr(self.mu)


def step_size(t: int, schedule: StepSchedule = StepSchedule()) -> float:
    """Step for iteration t.

    The ramp ``min((1 - exp(-t/330)) / 2, 0.1)`` keeps early steps short so
    the iterates do not settle into a spurious minimum, and reaches its cap
    from t = 74 on.
    """
    if t < 0:
        raise ValueError("iteration index must be nonnegative")
    if schedule.kind == "constant":
        return schedule.mu
    return min(-math.expm1(-t / PAPER_STEP_SCALE) / 2.0, PAPER_STEP_CAP)


@dataclass(frozen=True)
class SwfConfig:
    k_prior: int
    alpha_y: float = 3.0
    max_iters: int = 1000
    tol: float = 1e-7
    step: StepSchedule = field(default_factory=StepSchedule)
    power_iters: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        if self.k_prior < 1:
            raise ValueError("k_prior must be >= 1")
        if not self.alpha_y > 0:
            raise ValueError("alpha_y must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.power_iters < 1:
            raise ValueError("power_iters must be >= 1")


class Termination(str, enum.Enum):
    TOL_REACHED = "tol_reached"
    MAX_ITERS = "max_iters"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class IterationRecord:
    t: int
    objective: float
    step: float
    support: np.ndarray
    error: float | None = None


@dataclass
class SolveResult:
    estimate: np.ndarray
    iterations_run: int
    termination: Termination
    trace: list[IterationRecord]
    init: InitResult
    support_estimate: np.ndarray


def _check(A, y, n=None):
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2 or y.ndim != 1 or A.shape[0] != y.size:
        raise ValueError(f"shape mismatch: A {A.shape}, y {y.shape}")
    if n is not None and A.shape[1] != n:
        raise ValueError(f"A has {A.shape[1]} columns, vector has length {n}")
    if y.size == 0 or A.shape[1] == 0:
        raise ValueError("empty problem")
    return A, y


def _forward(A: np.ndarray, z: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(z)
    if 4 * nz.size < z.size:
        return A[:, nz] @ z[nz]
    return A @ z


def _gradient_from(A, y, Az):
    return (2.0 / y.size) * (((Az * Az - y) * Az) @ A)


def objective(z, A, y) -> float:
    """``1/(2m) * sum_i ((a_i . z)**2 - y_i)**2``."""
    z = np.asarray(z, dtype=float)
    A, y = _check(A, y, z.size)
    Az = A @ z
    return 0.5 * float(np.mean((Az * Az - y) ** 2))


def gradient(z, A, y) -> np.ndarray:
    """Gradient of :func:`objective`: ``(2/m) sum_i ((a_i.z)**2 - y_i)(a_i.z) a_i``."""
    z = np.asarray(z, dtype=float)
    A, y = _check(A, y, z.size)
    return _gradient_from(A, y, A @ z)


def hard_threshold(v, k: int) -> np.ndarray:
    """Keep the `k` largest-magnitude entries of `v` (lower index wins ties)."""
    v = np.asarray(v, dtype=float)
    if not 1 <= k <= v.size:
        raise ValueError(f"k must lie in [1, {v.size}], got {k}")
    if k == v.size:
        return v.copy()
    keep = _top_k(np.abs(v), k)
    out = np.zeros_like(v)
    out[keep] = v[keep]
    return out


def swf_iterate(z, A, y, k: int, mu: float, phi_sq: float) -> np.ndarray:
    """One step ``T_k(z - (mu / phi_sq) * grad f(z))``."""
    if not phi_sq > 0:
        raise ValueError(f"phi_sq must be positive, got {phi_sq}")
    return hard_threshold(np.asarray(z, dtype=float) - (mu / phi_sq) * gradient(z, A, y), k)


def swf_solve(A, y, config: SwfConfig, truth=None, record_trace: bool = True) -> SolveResult:
    """Run support recovery, spectral initialization and thresholded descent.

    Iteration t maps z^(t-1) to z^t with step ``step_size(t)`` and stops
    once ``||z^t - z^(t-1)|| < config.tol`` or after ``config.max_iters``
    steps. An overflowing iterate ends the run early with termination
    ``DIVERGED`` and the last finite iterate as the estimate.

    Parameters
    ----------
    A : ndarray, shape (m, n)
        Sensing vectors as rows.
    y : ndarray, shape (m,)
        Observed intensities.
    config : SwfConfig
    truth : array_like, optional
        Ground-truth signal; when given, each trace record carries
        ``dist(z^t, truth)``.
    record_trace : bool
        Skip per-iteration bookkeeping when False (the trace stays empty).
    """
    A, y = _check(A, y)
    n = A.shape[1]
    k = config.k_prior
    if k > n:
        raise ValueError(f"k_prior={k} exceeds signal length n={n}")
    if truth is not None:
        truth = np.asarray(truth, dtype=float)
        if truth.shape != (n,):
            raise ValueError("truth has the wrong length")

    S0 = top_k_indices(support_scores(A, y), k)
    init = truncated_spectral_init(A, y, S0, config.alpha_y, config.power_iters, config.rng_seed)
    phi_sq = phi_squared(y)
    z = init.z0
    trace: list[IterationRecord] = []
    if phi_sq == 0:
        # all intensities vanish (or average below zero); zero is the estimate
        return SolveResult(z, 0, Termination.TOL_REACHED, trace, init, S0)

    Az = _forward(A, z)
    termination = Termination.MAX_ITERS
    t = 0
    with np.errstate(over="ignore", invalid="ignore"):
        while t < config.max_iters:
            t += 1
            mu = step_size(t, config.step)
            grad = _gradient_from(A, y, Az)
            z_new = hard_threshold(z - (mu / phi_sq) * grad, k)
            if not np.all(np.isfinite(z_new)):
                # keep the last finite iterate
                termination = Termination.DIVERGED
                break
            diff = float(np.linalg.norm(z_new - z))
            z = z_new
            Az = _forward(A, z)
            if record_trace:
                trace.append(IterationRecord(
                    t=t,
                    objective=0.5 * float(np.mean((Az * Az - y) ** 2)),
                    step=mu,
                    support=np.flatnonzero(z) if k < n else np.arange(n),
                    error=None if truth is None else dist(z, truth),
                ))
            if diff < config.tol:
                termination = Termination.TOL_REACHED
                break
    return SolveResult(z, t, termination, trace, init, S0)


def wf_solve_baseline(A, y, config: SwfConfig, truth=None, record_trace: bool = True) -> SolveResult:
    """Plain Wirtinger flow: full-support initialization, no thresholding."""
    A, y = _check(A, y)
    return swf_solve(A, y, dataclasses.replace(config, k_prior=A.shape[1]), truth, record_trace)
