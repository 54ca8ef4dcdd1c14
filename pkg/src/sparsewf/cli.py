"""Command-line entry point: single solves and recovery-rate sweeps."""

from __future__ import annotations

import argparse
import sys

from sparsewf import harness
from sparsewf.metrics import classify_success, nmse
from sparsewf.model import measure, sample_measurement_vectors, sample_sparse_signal, sigma_for_snr
from sparsewf.solver import swf_solve, wf_solve_baseline

DEFAULT_AXES = {
    "sweep-ratio": "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0,1.5,2.0,2.5,3.0",
    "sweep-misspec": "5,10,20,32,50,75,100",
    "sweep-sparsity": "10,20,30,40,50,60,70,80,90,100",
    "sweep-noise": "5,6,7,8,9,10",
}
EXPERIMENT_FOR = {
    "sweep-ratio": "ratio_sweep",
    "sweep-misspec": "misspec_sweep",
    "sweep-sparsity": "sparsity_sweep",
    "sweep-noise": "noise_sweep",
}


def _float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _k_prior(text: str):
    if text in ("exact", "sqrt-n", "sqrt_n"):
        return text.replace("-", "_")
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--k-prior takes exact, sqrt-n or an integer, got {text!r}")


def _step(text: str) -> str:
    if text == "paper":
        return text
    try:
        if float(text) < 0:
            raise ValueError
    except ValueError:
        raise argparse.ArgumentTypeError(f"--step takes 'paper' or a nonnegative number, got {text!r}")
    return text


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, default=1000, help="signal length")
    p.add_argument("--k", type=int, default=10, help="true sparsity")
    p.add_argument("--k-prior", type=_k_prior, default="exact",
                   help="assumed sparsity: exact, sqrt-n or an integer")
    p.add_argument("--seed", type=int, default=0, help="master seed")
    p.add_argument("--alpha-y", type=float, default=3.0, help="truncation threshold")
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--tol", type=float, default=1e-7, help="stop when ||z_t - z_(t-1)|| < tol")
    p.add_argument("--step", type=_step, default="paper", help="'paper' ramp or a constant step")
    p.add_argument("--solver", choices=("swf", "wf"), default="swf")
    p.add_argument("--m-ratio", type=float, default=None,
                   help="m/n for solve and for sweeps whose axis is not the ratio")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparsewf", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve one random instance and print its NMSE")
    _add_common(p)
    p.add_argument("--snr-db", type=float, default=None, help="measurement SNR (default noiseless)")

    for name in EXPERIMENT_FOR:
        p = sub.add_parser(name, help=f"run the {EXPERIMENT_FOR[name].replace('_', ' ')}")
        _add_common(p)
        p.add_argument("--axis", type=_float_list, default=None, help="comma-separated axis values")
        p.add_argument("--trials", type=int, default=100, help="trials per axis value")
        p.add_argument("--snr-db", type=_float_list, default=None,
                       help="SNR list for sweep-noise; a single fixed SNR for other sweeps")
        p.add_argument("--out", default=None, help="CSV path (manifest written alongside)")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--resample-x", action="store_true", help="draw a new signal for every trial")
        p.add_argument("--timing", action="store_true",
                       help="record mean wall time (makes the CSV non-reproducible)")

    p = sub.add_parser("replay", help="re-run the sweep recorded in a manifest")
    p.add_argument("manifest", help="manifest file, or the CSV it sits next to")
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=1)
    return parser


def _solve(args) -> int:
    ratio = 1.0 if args.m_ratio is None else args.m_ratio
    m = max(1, int(round(ratio * args.n)))
    point_spec = harness.SweepSpec(
        "single", (ratio,), n=args.n, true_k=args.k, k_prior_rule=args.k_prior,
        trials_per_point=1, master_seed=args.seed,
        solver="swf" if args.solver == "swf" else "wf_baseline",
        alpha_y=args.alpha_y, max_iters=args.max_iters, tol=args.tol, step=args.step,
    )
    k_prior = point_spec.k_prior_for(args.k)
    x = sample_sparse_signal(args.n, args.k, harness.child_seed(args.seed, 0))
    A = sample_measurement_vectors(args.n, m, harness.child_seed(args.seed, 1))
    sigma = 0.0 if args.snr_db is None else sigma_for_snr(x, A, args.snr_db)
    y = measure(x, A, sigma, harness.child_seed(args.seed, 2)).intensities
    solve = swf_solve if args.solver == "swf" else wf_solve_baseline
    result = solve(A, y, point_spec.solver_config(k_prior, harness.child_seed(args.seed, 3)),
                   record_trace=False)
    err = nmse(result.estimate, x.values)
    print(f"n={args.n} m={m} k={args.k} k_prior={k_prior} sigma={sigma:.6g}")
    print(f"nmse={err:.6e} success={classify_success(err)} "
          f"iterations={result.iterations_run} termination={result.termination.value}")
    return 0


def _sweep_spec(args) -> harness.SweepSpec:
    experiment = EXPERIMENT_FOR[args.command]
    axis = args.axis
    fixed_snr = None
    if experiment == "noise_sweep":
        axis = axis or args.snr_db
    elif args.snr_db:
        if len(args.snr_db) != 1:
            raise ValueError("--snr-db takes a single value outside sweep-noise")
        fixed_snr = args.snr_db[0]
    if axis is None:
        axis = _float_list(DEFAULT_AXES[args.command])
    return harness.SweepSpec(
        experiment, axis, n=args.n, true_k=args.k, k_prior_rule=args.k_prior,
        trials_per_point=args.trials, master_seed=args.seed,
        solver="swf" if args.solver == "swf" else "wf_baseline",
        m_over_n=args.m_ratio, noise_snr_db=fixed_snr, resample_x=args.resample_x,
        alpha_y=args.alpha_y, max_iters=args.max_iters, tol=args.tol, step=args.step,
        record_timing=args.timing,
    )


def _report(spec, args) -> int:
    def progress(row):
        print(f"axis={row.axis_value:g} rate={row.recovery_rate:.3f} "
              f"mean_nmse={row.mean_nmse:.3e} mean_iters={row.mean_iterations:.1f}",
              file=sys.stderr)

    if args.workers < 1:
        raise ValueError("--workers must be >= 1")
    table = harness.run_sweep(spec, workers=args.workers, progress=progress)
    if args.out:
        harness.emit_results(table, args.out)
    else:
        sys.stdout.write(harness.format_csv(table))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            return _solve(args)
        if args.command == "replay":
            return _report(harness.spec_from_manifest(args.manifest), args)
        return _report(_sweep_spec(args), args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
