"""Seeded Monte-Carlo sweeps over the recovery experiments.

Every trial draws its data from a seed derived only from the sweep's master
seed, the experiment name, the axis position and the trial index, so a sweep
produces the same table no matter how its trials are scheduled.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
import time
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from sparsewf.metrics import TrialOutcome, classify_success, nmse
from sparsewf.model import measure, sample_measurement_vectors, sample_sparse_signal, sigma_for_snr
from sparsewf.solver import StepSchedule, SwfConfig, swf_solve, wf_solve_baseline

EXPERIMENTS = ("ratio_sweep", "misspec_sweep", "sparsity_sweep", "noise_sweep", "single")
SOLVERS = ("swf", "wf_baseline")
CSV_COLUMNS = ("axis", "recovery_rate", "mean_nmse", "mean_iterations", "mean_wall_time_s", "trials")
MANIFEST_SUFFIX = ".manifest.json"
MANIFEST_FORMAT = 1
SNR_DEFINITION = "snr_db = 10*log10(mean_i((a_i . x)**4) / sigma**2), sigma = noise std"

_DEFAULT_RATIO = {"misspec_sweep": 1.0, "sparsity_sweep": 1.5, "noise_sweep": 1.5}

# stream labels for the per-trial seed tree
_STREAM_A, _STREAM_NOISE, _STREAM_SOLVER = 0, 1, 2


def _tag(name: str) -> int:
    return zlib.crc32(name.encode())


def child_seed(master_seed: int, *keys: int) -> int:
    """Stable 63-bit seed from a master seed and a tuple of integer keys."""
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass(frozen=True)
class SweepSpec:
    """Parameters of one experiment campaign.

    `k_prior_rule` is ``"exact"`` (use the true sparsity), ``"sqrt_n"``
    (``isqrt(n)``) or a fixed integer. `m_over_n` sets the measurement
    ratio for sweeps whose axis is not the ratio itself (defaults: 1.0 for
    the misspecification sweep, 1.5 for sparsity and noise sweeps).
    `noise_snr_db` adds noise at a fixed SNR to the non-noise sweeps.
    """

    experiment: str
    axis_values: tuple[float, ...]
    n: int = 1000
    true_k: int = 10
    k_prior_rule: str | int = "exact"
    trials_per_point: int = 100
    master_seed: int = 0
    solver: str = "swf"
    m_over_n: float | None = None
    noise_snr_db: float | None = None
    resample_x: bool = False
    alpha_y: float = 3.0
    max_iters: int = 1000
    tol: float = 1e-7
    step: str = "paper"
    power_iters: int = 100
    record_timing: bool = False

    def __post_init__(self):
        axis = tuple(float(v) for v in self.axis_values)
        object.__setattr__(self, "axis_values", axis)
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}")
        if not axis:
            raise ValueError("axis_values must not be empty")
        if any(b <= a for a, b in zip(axis, axis[1:])):
            raise ValueError("axis_values must be strictly increasing")
        if self.n < 1 or not 1 <= self.true_k <= self.n:
            raise ValueError(f"need 1 <= true_k <= n, got n={self.n}, true_k={self.true_k}")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")
        if isinstance(self.k_prior_rule, str):
            if self.k_prior_rule not in ("exact", "sqrt_n"):
                raise ValueError(f"unknown k_prior_rule {self.k_prior_rule!r}")
        elif not 1 <= self.k_prior_rule <= self.n:
            raise ValueError(f"fixed k_prior must lie in [1, {self.n}]")
        if self.experiment in ("misspec_sweep", "sparsity_sweep"):
            if any(v != int(v) or not 1 <= v <= self.n for v in axis):
                raise ValueError(f"{self.experiment} axis values must be integers in [1, {self.n}]")
        if self.experiment in ("ratio_sweep", "single") and any(v <= 0 for v in axis):
            raise ValueError("measurement ratios must be positive")
        if self.experiment == "single" and len(axis) != 1:
            raise ValueError("a single experiment has exactly one axis value")
        self.solver_config(1)  # validates alpha_y, tol, step and friends

    def schedule(self) -> StepSchedule:
        return StepSchedule.paper() if self.step == "paper" else StepSchedule.constant(float(self.step))

    def solver_config(self, k_prior: int, rng_seed: int = 0) -> SwfConfig:
        return SwfConfig(k_prior=k_prior, alpha_y=self.alpha_y, max_iters=self.max_iters,
                         tol=self.tol, step=self.schedule(), power_iters=self.power_iters,
                         rng_seed=rng_seed)

    def k_prior_for(self, true_k: int) -> int:
        if self.k_prior_rule == "exact":
            return true_k
        if self.k_prior_rule == "sqrt_n":
            return math.isqrt(self.n)
        return int(self.k_prior_rule)


@dataclass(frozen=True)
class SweepPoint:
    axis_value: float
    m: int
    true_k: int
    k_prior: int
    snr_db: float | None


def resolve_point(spec: SweepSpec, axis_index: int) -> SweepPoint:
    v = spec.axis_values[axis_index]
    ratio = spec.m_over_n if spec.m_over_n is not None else _DEFAULT_RATIO.get(spec.experiment)
    true_k, snr = spec.true_k, spec.noise_snr_db
    if spec.experiment in ("ratio_sweep", "single"):
        ratio = v
    k_prior = spec.k_prior_for(true_k)
    if spec.experiment == "misspec_sweep":
        k_prior = int(v)
    elif spec.experiment == "sparsity_sweep":
        true_k = int(v)
        k_prior = spec.k_prior_for(true_k)
    elif spec.experiment == "noise_sweep":
        snr = v
    m = max(1, int(round(ratio * spec.n)))
    if k_prior > spec.n:
        raise ValueError(f"k_prior={k_prior} exceeds n={spec.n}")
    return SweepPoint(v, m, true_k, k_prior, snr)


def run_trial(spec: SweepSpec, axis_index: int, trial_index: int) -> TrialOutcome:
    """Sample one instance for the given sweep point and solve it."""
    point = resolve_point(spec, axis_index)
    base = (_tag(spec.experiment), axis_index, trial_index)
    if spec.resample_x:
        signal_seed = child_seed(spec.master_seed, _tag("signal"), point.true_k, axis_index, trial_index)
    else:
        signal_seed = child_seed(spec.master_seed, _tag("signal"), point.true_k)
    x = sample_sparse_signal(spec.n, point.true_k, signal_seed)
    A = sample_measurement_vectors(spec.n, point.m, child_seed(spec.master_seed, *base, _STREAM_A))
    sigma = 0.0 if point.snr_db is None else sigma_for_snr(x, A, point.snr_db)
    y = measure(x, A, sigma, child_seed(spec.master_seed, *base, _STREAM_NOISE)).intensities
    solver_seed = child_seed(spec.master_seed, *base, _STREAM_SOLVER)
    config = spec.solver_config(point.k_prior, solver_seed)
    solve = swf_solve if spec.solver == "swf" else wf_solve_baseline

    with threadpool_limits(limits=1):
        start = time.perf_counter()
        result = solve(A, y, config, record_trace=False)
        elapsed = time.perf_counter() - start
    err = nmse(result.estimate, x.values)
    return TrialOutcome(err, classify_success(err), result.iterations_run, elapsed,
                        child_seed(spec.master_seed, *base))


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    recovery_rate: float
    mean_nmse: float
    mean_iterations: float
    mean_wall_time_s: float
    trials: int

    def as_tuple(self):
        return dataclasses.astuple(self)


@dataclass
class SweepTable:
    rows: list[SweepRow]
    spec: SweepSpec | None = None

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows])

    def row_for(self, axis_value: float) -> SweepRow:
        for r in self.rows:
            if r.axis_value == axis_value:
                return r
        raise KeyError(axis_value)

    def same_rows(self, other: SweepTable) -> bool:
        """Row equality with NaN matching NaN."""
        if len(self.rows) != len(other.rows):
            return False
        for a, b in zip(self.rows, other.rows):
            for u, v in zip(a.as_tuple(), b.as_tuple()):
                if not (u == v or (isinstance(u, float) and math.isnan(u) and math.isnan(v))):
                    return False
        return True


def aggregate(axis_value: float, outcomes: list[TrialOutcome], record_timing: bool) -> SweepRow:
    """Fold the outcomes of one point, in trial-index order, into a row."""
    trials = len(outcomes)
    successes = sum(o.success for o in outcomes)
    wall = math.fsum(o.wall_time_s for o in outcomes) / trials if record_timing else math.nan
    return SweepRow(
        axis_value=axis_value,
        recovery_rate=successes / trials,
        mean_nmse=math.fsum(o.nmse for o in outcomes) / trials,
        mean_iterations=math.fsum(o.iterations for o in outcomes) / trials,
        mean_wall_time_s=wall,
        trials=trials,
    )


def _trial_task(args):
    spec, axis_index, trial_index = args
    return run_trial(spec, axis_index, trial_index)


def run_sweep(spec: SweepSpec, workers: int = 1, progress=None) -> SweepTable:
    """Run every trial of every point and aggregate by trial index.

    Parameters
    ----------
    workers : int
        Number of worker processes; 1 runs in-process. The table does not
        depend on this value.
    progress : callable, optional
        Called with each finished row.
    """
    for i in range(len(spec.axis_values)):
        resolve_point(spec, i)
    tasks = [(spec, i, j) for i in range(len(spec.axis_values)) for j in range(spec.trials_per_point)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_trial_task, tasks, chunksize=max(1, len(tasks) // (4 * workers))))
    else:
        outcomes = []
        for task in tasks:
            outcomes.append(_trial_task(task))
    rows = []
    T = spec.trials_per_point
    for i, v in enumerate(spec.axis_values):
        row = aggregate(v, outcomes[i * T:(i + 1) * T], spec.record_timing)
        rows.append(row)
        if progress is not None:
            progress(row)
    return SweepTable(rows, spec)


def _require(spec: SweepSpec, experiment: str):
    if spec.experiment != experiment:
        raise ValueError(f"expected a {experiment} spec, got {spec.experiment}")


def ratio_sweep(spec: SweepSpec, workers: int = 1) -> SweepTable:
    """Recovery rate against the measurement ratio m/n."""
    _require(spec, "ratio_sweep")
    return run_sweep(spec, workers)


def misspec_sweep(spec: SweepSpec, workers: int = 1) -> SweepTable:
    """Recovery rate against the assumed sparsity with the true one fixed."""
    _require(spec, "misspec_sweep")
    return run_sweep(spec, workers)


def sparsity_sweep(spec: SweepSpec, workers: int = 1) -> SweepTable:
    _require(spec, "sparsity_sweep")
    return run_sweep(spec, workers)


def noise_sweep(spec: SweepSpec, workers: int = 1) -> SweepTable:
    """Mean NMSE against measurement SNR in dB (``inf`` is noiseless)."""
    _require(spec, "noise_sweep")
    return run_sweep(spec, workers)


# --- serialization -------------------------------------------------------


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def format_csv(table: SweepTable) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in table.rows:
        lines.append(",".join(_fmt(v) for v in r.as_tuple()))
    return "\n".join(lines) + "\n"


def manifest_dict(spec: SweepSpec) -> dict:
    from sparsewf import __version__

    return {
        "format": MANIFEST_FORMAT,
        "package": "sparsewf",
        "version": __version__,
        "spec": dataclasses.asdict(spec),
        "seed_derivation": (
            "numpy SeedSequence(entropy=master_seed, spawn_key=(crc32(experiment), axis_index, "
            "trial_index, stream)); streams 0=A, 1=noise, 2=solver; signal uses "
            "spawn_key=(crc32('signal'), true_k[, axis_index, trial_index when resample_x])"
        ),
        "signal_policy": "resampled per trial" if spec.resample_x else "fixed per sparsity level",
        "snr_definition": SNR_DEFINITION,
        "success_rule": "nmse < 1e-5, nmse = min(||xhat - x||, ||xhat + x||) / ||x||",
        "columns": list(CSV_COLUMNS),
        "wall_time": ("measured around the solver call; not reproducible" if spec.record_timing
                      else "not recorded (column is nan)"),
    }


def manifest_path(path) -> Path:
    path = Path(path)
    return path.with_name(path.name + MANIFEST_SUFFIX)


def emit_results(table: SweepTable, path) -> Path:
    """Write the CSV table and, when the table carries its spec, a JSON manifest.

    Reals are written with 17 significant digits so they parse back to the
    same doubles. Returns the CSV path.
    """
    path = Path(path)
    try:
        path.write_text(format_csv(table))
        if table.spec is not None:
            manifest_path(path).write_text(json.dumps(manifest_dict(table.spec), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc.strerror or exc}") from exc
    return path


def read_results(path) -> SweepTable:
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_COLUMNS:
            raise ValueError(f"{path}: unexpected header {header}")
        rows = [SweepRow(float(a), float(r), float(e), float(it), float(w), int(t))
                for a, r, e, it, w, t in reader]
    return SweepTable(rows)


def spec_from_manifest(path) -> SweepSpec:
    """Rebuild the SweepSpec recorded in a manifest (or next to a CSV file)."""
    path = Path(path)
    if not path.name.endswith(MANIFEST_SUFFIX):
        path = manifest_path(path)
    data = json.loads(path.read_text())
    if data.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"{path}: unsupported manifest format {data.get('format')!r}")
    fields = data["spec"]
    fields["axis_values"] = tuple(fields["axis_values"])
    return SweepSpec(**fields)
