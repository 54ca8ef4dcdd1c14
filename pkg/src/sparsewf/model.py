"""Sparse test signals, Gaussian sensing ensembles and intensity measurements."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SignalVector:
    """A real k-sparse signal together with its support.

    Attributes
    ----------
    values : ndarray, shape (n,)
        Dense representation of the signal.
    support : ndarray of int
        Sorted indices of the nonzero entries.
    sparsity_k : int
        Number of nonzeros, ``len(support)``.
    """

    values: np.ndarray
    support: np.ndarray
    sparsity_k: int

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        support = np.sort(np.asarray(self.support, dtype=np.intp))
        if values.ndim != 1:
            raise ValueError("signal values must be a 1-d array")
        n = values.size
        if not 1 <= self.sparsity_k <= n:
            raise ValueError(f"sparsity_k must lie in [1, {n}], got {self.sparsity_k}")
        if support.size != self.sparsity_k or np.unique(support).size != support.size:
            raise ValueError("support must hold exactly sparsity_k distinct indices")
        if support.size and (support[0] < 0 or support[-1] >= n):
            raise ValueError("support index out of range")
        off = np.ones(n, dtype=bool)
        off[support] = False
        if np.any(values[off] != 0) or np.any(values[support] == 0):
            raise ValueError("values must be nonzero exactly on the support")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "support", support)

    @property
    def n(self) -> int:
        return self.values.size

    @property
    def x_min(self) -> float:
        """Smallest nonzero magnitude."""
        return float(np.min(np.abs(self.values[self.support])))

    @classmethod
    def from_values(cls, values) -> SignalVector:
        values = np.asarray(values, dtype=float)
        support = np.flatnonzero(values)
        return cls(values, support, int(support.size))


@dataclass(frozen=True)
class MeasurementEnsemble:
    """Sensing vectors (rows of ``vectors``) and their observed intensities."""

    vectors: np.ndarray
    intensities: np.ndarray
    noise_sigma: float = 0.0

    def __post_init__(self):
        A = np.asarray(self.vectors, dtype=float)
        y = np.asarray(self.intensities, dtype=float)
        if A.ndim != 2 or y.ndim != 1 or A.shape[0] != y.size:
            raise ValueError(
                f"need an (m, n) matrix and length-m intensities, got {A.shape} and {y.shape}"
            )
        if not self.noise_sigma >= 0:
            raise ValueError("noise_sigma must be nonnegative")
        object.__setattr__(self, "vectors", A)
        object.__setattr__(self, "intensities", y)

    @property
    def m(self) -> int:
        return self.vectors.shape[0]

    @property
    def n(self) -> int:
        return self.vectors.shape[1]


def sample_sparse_signal(n: int, k: int, rng_seed: int) -> SignalVector:
    """Draw a k-sparse signal with i.i.d. standard normal nonzeros.

    The support is a uniformly random size-k subset of ``range(n)``.
    """
    if n < 1 or not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    rng = np.random.default_rng(rng_seed)
    support = np.sort(rng.choice(n, size=k, replace=False))
    amplitudes = rng.standard_normal(k)
    # a draw of exactly 0.0 would break the support invariant
    while np.any(amplitudes == 0):
        amplitudes[amplitudes == 0] = rng.standard_normal(int(np.sum(amplitudes == 0)))
    values = np.zeros(n)
    values[support] = amplitudes
    return SignalVector(values, support, k)


def sample_measurement_vectors(n: int, m: int, rng_seed: int) -> np.ndarray:
    """Return an (m, n) matrix of i.i.d. N(0, 1) entries; row i is a_i."""
    if n < 1 or m < 1:
        raise ValueError(f"dimensions must be positive, got n={n}, m={m}")
    return np.random.default_rng(rng_seed).standard_normal((m, n))


def _signal_values(x) -> np.ndarray:
    return x.values if isinstance(x, SignalVector) else np.asarray(x, dtype=float)


def measure(x, A, noise_sigma: float = 0.0, rng_seed: int = 0) -> MeasurementEnsemble:
    """Intensity measurements ``y_i = (a_i . x)**2 + eps_i``.

    ``eps_i`` is i.i.d. normal with standard deviation `noise_sigma`. With
    ``noise_sigma == 0`` no random numbers are drawn and the intensities are
    exact squares.
    """
    xv = _signal_values(x)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] != xv.size:
        raise ValueError(f"matrix of shape {A.shape} does not match signal length {xv.size}")
    if not noise_sigma >= 0:
        raise ValueError("noise_sigma must be nonnegative")
    y = (A @ xv) ** 2
    if noise_sigma > 0:
        y = y + noise_sigma * np.random.default_rng(rng_seed).standard_normal(y.size)
    return MeasurementEnsemble(A, y, float(noise_sigma))


def sigma_for_snr(x, A, snr_db: float) -> float:
    """Noise standard deviation giving the requested measurement SNR.

    SNR is taken as ``10*log10(mean((a_i . x)**4) / sigma**2)``, i.e. the
    power of the clean intensity vector over the noise variance. An
    ``snr_db`` of ``+inf`` means noiseless and returns 0.
    """
    xv = _signal_values(x)
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] != xv.size:
        raise ValueError(f"matrix of shape {A.shape} does not match signal length {xv.size}")
    power = float(np.mean((A @ xv) ** 4))
    if power <= 0:
        raise ValueError("signal produces zero measurement power")
    if math.isinf(snr_db) and snr_db > 0:
        return 0.0
    if math.isnan(snr_db):
        raise ValueError("snr_db is NaN")
    return math.sqrt(power / 10.0 ** (snr_db / 10.0))


def measured_snr_db(x, A, noise_sigma: float) -> float:
    """Inverse of :func:`sigma_for_snr`."""
    xv = _signal_values(x)
    power = float(np.mean((np.asarray(A, dtype=float) @ xv) ** 4))
    if noise_sigma == 0:
        return math.inf
    return 10.0 * math.log10(power / noise_sigma**2)
