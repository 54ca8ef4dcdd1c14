"""Sparse phase retrieval by hard-thresholded Wirtinger flow."""

from sparsewf.metrics import TrialOutcome, classify_success, dist, nmse
from sparsewf.model import (
    MeasurementEnsemble,
    SignalVector,
    measure,
    sample_measurement_vectors,
    sample_sparse_signal,
    sigma_for_snr,
)
from sparsewf.solver import (
    SolveResult,
    StepSchedule,
    SwfConfig,
    gradient,
    hard_threshold,
    objective,
    step_size,
    swf_iterate,
    swf_solve,
    wf_solve_baseline,
)
from sparsewf.spectral import (
    InitResult,
    assemble_initial,
    build_truncated_matrix,
    phi_squared,
    power_method,
    truncated_spectral_init,
)
from sparsewf.support import SupportScores, support_scores, top_k_indices

__version__ = "0.1.0"

__all__ = [
    "InitResult",
    "MeasurementEnsemble",
    "SignalVector",
    "SolveResult",
    "StepSchedule",
    "SupportScores",
    "SwfConfig",
    "TrialOutcome",
    "assemble_initial",
    "build_truncated_matrix",
    "classify_success",
    "dist",
    "gradient",
    "hard_threshold",
    "measure",
    "nmse",
    "objective",
    "phi_squared",
    "power_method",
    "sample_measurement_vectors",
    "sample_sparse_signal",
    "sigma_for_snr",
    "step_size",
    "support_scores",
    "swf_iterate",
    "swf_solve",
    "top_k_indices",
    "truncated_spectral_init",
    "wf_solve_baseline",
]
