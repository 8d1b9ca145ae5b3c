"""Command line entry points: run, accelerate, sweep.

Exit codes are stable: 0 success, 2 usage or configuration error,
3 numerical failure, 4 file format or I/O error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace

import numpy as np

from .checkpoint import read_checkpoint_dir, read_checkpoints, write_checkpoints
from .core import RnaConfig
from .errors import (
    FormatError,
    InvalidConfig,
    RnaError,
    WindowTooSmall,
)
from .experiment import (
    ExperimentSpec,
    accelerate_checkpoints,
    default_spec,
    run_experiment,
    sweep,
)

USAGE_EXIT = 2
NUMERICAL_EXIT = 3
FORMAT_EXIT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rnacc",
        description="Extrapolate optimizer iterates offline from a sliding "
        "window of checkpoints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser(
        "run", help="train a built-in problem and record vanilla vs accelerated curves"
    )
    run_p.add_argument("--spec", help="experiment spec file (key = value lines)")
    run_p.add_argument(
        "--problem",
        choices=("quadratic", "logistic", "mlp"),
        help="built-in problem; overrides the spec file's selector",
    )
    run_p.add_argument("--k", type=int, help="window size (default 10)")
    run_p.add_argument(
        "--lambda", dest="lam", type=float, help="ridge parameter (default 1e-8)"
    )
    run_p.add_argument(
        "--lambda-grid",
        dest="lam_grid",
        help="comma-separated ascending ridge grid; enables adaptive selection",
    )
    run_p.add_argument("--epochs", type=int, help="number of training epochs")
    run_p.add_argument("--seed", type=int, help="problem and shuffling seed")
    run_p.add_argument("--out", help="metrics file path (default metrics.csv)")
    run_p.add_argument(
        "--flush-on-drop",
        action="store_const",
        const=True,
        help="empty the window at every learning rate drop",
    )
    run_p.set_defaults(func=cmd_run)

    acc_p = sub.add_parser(
        "accelerate", help="extrapolate an exported checkpoint sequence offline"
    )
    acc_p.add_argument("checkpoints", help="checkpoint file, or directory of files")
    acc_p.add_argument("--k", type=int, default=10, help="window size (default 10)")
    acc_p.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=1e-8,
        help="ridge parameter (default 1e-8)",
    )
    acc_p.add_argument(
        "--lambda-grid",
        dest="lam_grid",
        help="comma-separated ascending ridge grid; requires --scores",
    )
    acc_p.add_argument(
        "--scores",
        help="text file with one objective value per checkpoint, used to rank "
        "grid candidates by their unit-sum linearization",
    )
    acc_p.add_argument("--out", required=True, help="output checkpoint file")
    acc_p.set_defaults(func=cmd_accelerate)

    sweep_p = sub.add_parser(
        "sweep", help="grid of (window, lambda) cells, one metrics file each"
    )
    sweep_p.add_argument("--spec", help="experiment spec file")
    sweep_p.add_argument(
        "--problem", choices=("quadratic", "logistic", "mlp"), help="built-in problem"
    )
    sweep_p.add_argument("--epochs", type=int, help="number of training epochs")
    sweep_p.add_argument("--seed", type=int, help="problem and shuffling seed")
    sweep_p.add_argument(
        "--k-list", required=True, help="comma-separated window sizes"
    )
    sweep_p.add_argument(
        "--lambda-list", dest="lam_list", required=True, help="comma-separated ridges"
    )
    sweep_p.add_argument(
        "--out", default="sweep_out", help="output directory (default sweep_out)"
    )
    sweep_p.set_defaults(func=cmd_sweep)
    return parser


def _parse_floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise InvalidConfig(f"expected comma-separated numbers, got {text!r}") from None


def _spec_from_args(args) -> ExperimentSpec:
    if args.spec:
        spec = ExperimentSpec.from_file(args.spec)
        if args.problem and args.problem != spec.problem:
            fresh = default_spec(args.problem, seed=args.seed)
            spec = replace(
                spec,
                problem=fresh.problem,
                problem_params=fresh.problem_params,
                optimizer=replace(fresh.optimizer, seed=spec.optimizer.seed),
            )
    else:
        spec = default_spec(args.problem or "quadratic", seed=args.seed)
    if args.seed is not None:
        params = dict(spec.problem_params)
        params["seed"] = args.seed
        spec = replace(
            spec,
            problem_params=params,
            optimizer=replace(spec.optimizer, seed=args.seed),
        )
    if args.epochs is not None:
        spec = replace(spec, epochs=args.epochs)
    rna_kwargs = {
        "window": spec.rna.window,
        "lam": spec.rna.lam,
        "lam_grid": spec.rna.lam_grid,
        "weight_target": spec.rna.weight_target,
    }
    if getattr(args, "k", None) is not None:
        rna_kwargs["window"] = args.k
    if getattr(args, "lam", None) is not None:
        rna_kwargs["lam"] = args.lam
    if getattr(args, "lam_grid", None):
        rna_kwargs["lam_grid"] = _parse_floats(args.lam_grid)
    spec = replace(spec, rna=RnaConfig(**rna_kwargs))
    if getattr(args, "out", None):
        spec = replace(spec, metrics_out=args.out)
    if getattr(args, "flush_on_drop", None):
        spec = replace(spec, flush_on_drop=True)
    return spec


def cmd_run(args) -> int:
    spec = _spec_from_args(args)
    vanilla, accelerated, _ = run_experiment(spec)
    last_v, last_a = vanilla[-1], accelerated[-1]
    print(f"wrote {spec.metrics_out} ({len(vanilla)} epochs)")
    print(f"final objective        : {last_v.objective:.10e}")
    print(f"final objective (accel): {last_a.objective:.10e}")
    return 0


def _read_scores(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        values = [float(line) for line in fh if line.strip()]
    return np.asarray(values)


def cmd_accelerate(args) -> int:
    path = args.checkpoints
    mat = read_checkpoint_dir(path) if os.path.isdir(path) else read_checkpoints(path)
    if mat.shape[0] < 2:
        raise WindowTooSmall(
            f"{path}: {mat.shape[0]} checkpoint(s); need at least 2 to extrapolate"
        )
    if args.k + 1 > mat.shape[0]:
        print(
            f"warning: window {args.k} wants {args.k + 1} checkpoints, only "
            f"{mat.shape[0]} available; using all of them",
            file=sys.stderr,
        )
    grid = _parse_floats(args.lam_grid) if args.lam_grid else None
    scores = _read_scores(args.scores) if args.scores else None
    theta_hat, lam_star, coeffs = accelerate_checkpoints(
        mat, window=args.k, lam=args.lam, lam_grid=grid, scores=scores
    )
    write_checkpoints(args.out, [theta_hat], "f64")
    if coeffs is None:
        print("candidates ranked worse than the last checkpoint; returned it unchanged")
        print("lambda: none")
    else:
        print(f"lambda: {lam_star!r}")
        print("coefficients:", " ".join(format(w, ".17g") for w in coeffs.weights))
    print(f"wrote {args.out}")
    return 0


def cmd_sweep(args) -> int:
    spec = _spec_from_args(
        argparse.Namespace(
            spec=args.spec,
            problem=args.problem,
            seed=args.seed,
            epochs=args.epochs,
            k=None,
            lam=None,
            lam_grid=None,
            out=None,
            flush_on_drop=None,
        )
    )
    windows = [int(v) for v in _parse_floats(args.k_list)]
    lams = list(_parse_floats(args.lam_list))
    if not windows or not lams:
        raise InvalidConfig("sweep needs nonempty --k-list and --lambda-list")
    cells = sweep(spec, windows, lams, args.out)
    ok = [c for c in cells if c.status == "ok"]
    print(f"{len(ok)}/{len(cells)} cells succeeded; summary in {args.out}/summary.csv")
    for cell in cells:
        tag = f"k={cell.window} lambda={cell.lam:g}"
        if cell.status == "ok":
            print(f"  {tag}: final accel objective {cell.final_objective_rna:.10e}")
        else:
            print(f"  {tag}: FAILED ({cell.error})")
    if not ok:
        print("every sweep cell failed", file=sys.stderr)
        return NUMERICAL_EXIT
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidConfig, WindowTooSmall) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FORMAT_EXIT
    except RnaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return NUMERICAL_EXIT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
