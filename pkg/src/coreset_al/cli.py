"""Command-line entry points.

Four subcommands: ``acquire`` runs one acquisition step over CSV inputs,
``experiment`` drives the full closed loop from a config file, ``bounds``
tabulates the convergence-bound curves, and ``verify`` cross-checks the
bound formulas numerically. Every run with the same flags and seed writes
byte-identical CSV files.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from coreset_al import dataio
from coreset_al.bounds import BoundParams, bound_curve_grid, verify_claims
from coreset_al.harness import (
    DATASETS,
    STRATEGIES,
    ExperimentConfig,
    run_experiment,
)
from coreset_al.model import OPTIMIZERS, TrainConfig
from coreset_al.selection import (
    ACQUIRED_POINT,
    SCALING_MODES,
    beam_doubted_coreset,
    doubt,
    doubted_coreset,
    greedy_coreset,
    kmeans_closest_coreset,
    least_confidence_acquisition,
    max_entropy_acquisition,
    random_acquisition,
)

_PROB_METHODS = ("doubt-coreset", "beam-coreset", "least-confidence", "max-entropy")
_LABELED_METHODS = ("coreset", "doubt-coreset", "beam-coreset")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ValueError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coreset-al",
        description="Batch active-learning acquisition, experiments, and bound tooling.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    acquire = sub.add_parser(
        "acquire", help="run one acquisition step over CSV inputs"
    )
    acquire.add_argument("--features", required=True, help="feature matrix CSV (header f0,...)")
    acquire.add_argument(
        "--labeled-mask",
        required=True,
        help="selection CSV marking currently labeled rows (index,selected)",
    )
    acquire.add_argument(
        "--probs",
        help="class-probability CSV aligned to the feature rows (header f0,...)",
    )
    acquire.add_argument("--method", required=True, choices=STRATEGIES)
    acquire.add_argument("--budget", required=True, type=int)
    acquire.add_argument("--beam", type=int, default=1, help="beam width for beam-coreset")
    acquire.add_argument("--scaling-mode", choices=SCALING_MODES, default=ACQUIRED_POINT)
    acquire.add_argument("--batch-size", type=int, default=256)
    acquire.add_argument("--seed", type=int, default=0)
    acquire.add_argument("--out", required=True, help="output selection CSV over unlabeled rows")
    acquire.add_argument(
        "--beam-out", help="also write the ranked beam configurations to this CSV"
    )
    acquire.set_defaults(handler=_cmd_acquire)

    experiment = sub.add_parser(
        "experiment", help="run the closed acquire/label/retrain loop"
    )
    experiment.add_argument("--config", required=True, help="experiment config file (key = value)")
    experiment.add_argument("--out-dir", required=True)
    experiment.set_defaults(handler=_cmd_experiment)

    bounds = sub.add_parser("bounds", help="tabulate the convergence-bound curves")
    bounds.add_argument("--lambda-c", type=float, default=1.0)
    bounds.add_argument("--lambda-eps", type=float, default=1.0)
    bounds.add_argument("--z", default="0.1,0.25,0.5", help="comma-separated z slices in (0,1)")
    bounds.add_argument("--delta-min", type=float, default=0.05)
    bounds.add_argument("--delta-max", type=float, default=3.0)
    bounds.add_argument("--steps", type=int, default=120)
    bounds.add_argument("--out", required=True, help="output curves CSV")
    bounds.set_defaults(handler=_cmd_bounds)

    verify = sub.add_parser("verify", help="numeric self-checks of the bound formulas")
    verify.add_argument("--tol-quadrature", type=float, default=1e-9)
    verify.add_argument("--tol-identity", type=float, default=1e-12)
    verify.set_defaults(handler=_cmd_verify)

    return parser


def _cmd_acquire(args) -> int:
    features = dataio.read_feature_csv(args.features)
    indices, bits = dataio.read_selection_csv(args.labeled_mask)
    if sorted(indices.tolist()) != list(range(features.shape[0])):
        raise ValueError(
            f"labeled mask must cover every feature row exactly once "
            f"(features has {features.shape[0]} rows)"
        )
    labeled_rows = np.sort(indices[bits])
    unlabeled_rows = np.sort(indices[~bits])
    if unlabeled_rows.size == 0:
        raise ValueError("no unlabeled rows to acquire from")
    if args.method in _LABELED_METHODS and labeled_rows.size == 0:
        raise ValueError(f"method {args.method!r} needs at least one labeled row")

    probs = None
    doubts = None
    if args.method in _PROB_METHODS:
        if not args.probs:
            raise ValueError(f"method {args.method!r} requires --probs")
        all_probs = dataio.read_feature_csv(args.probs)
        if all_probs.shape[0] != features.shape[0]:
            raise ValueError(
                f"probs has {all_probs.shape[0]} rows, features has {features.shape[0]}"
            )
        probs = all_probs[unlabeled_rows]
        doubts = doubt(probs)

    x_u = features[unlabeled_rows]
    x_l = features[labeled_rows] if labeled_rows.size else None
    ranked = None
    if args.method == "random":
        mask = random_acquisition(unlabeled_rows.size, args.budget, args.seed)
    elif args.method == "coreset":
        mask = greedy_coreset(x_u, x_l, args.budget, args.batch_size)
    elif args.method == "doubt-coreset":
        mask = doubted_coreset(
            x_u, x_l, doubts, args.budget, args.batch_size, args.scaling_mode
        )
    elif args.method == "beam-coreset":
        mask, ranked = beam_doubted_coreset(
            x_u, x_l, doubts, args.budget, args.batch_size, args.beam, args.scaling_mode
        )
    elif args.method == "least-confidence":
        mask = least_confidence_acquisition(doubts, args.budget)
    elif args.method == "max-entropy":
        mask = max_entropy_acquisition(probs, args.budget)
    else:  # kmeans-closest
        mask = kmeans_closest_coreset(x_u, x_l, args.budget, args.seed)

    dataio.write_selection_csv(args.out, unlabeled_rows, mask)
    if args.beam_out:
        if ranked is None:
            raise ValueError("--beam-out is only meaningful with --method beam-coreset")
        dataio.write_beam_csv(args.beam_out, ranked, index_map=unlabeled_rows)
    print(f"acquired {int(mask.sum())} of {unlabeled_rows.size} unlabeled rows -> {args.out}")
    return 0


def _cmd_experiment(args) -> int:
    config = load_config(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    result = run_experiment(config)
    dataio.write_metrics_csv(out_dir / "metrics.csv", result.records)
    dataio.write_summary_csv(out_dir / "summary.csv", result.summary)

    for (strategy, trial), tr in result.trials.items():
        if strategy == config.strategies[0]:
            # the split is strategy-independent, write it once per trial
            dataio.write_split_csv(out_dir / f"split_trial{trial:02d}.csv", tr.split)
        for i, (pool_rows, bits) in enumerate(tr.acquisition_masks, start=1):
            dataio.write_selection_csv(
                out_dir / f"mask_{strategy}_trial{trial:02d}_iter{i:02d}.csv",
                pool_rows,
                bits,
            )

    from coreset_al import plots

    plots.plot_learning_curves(result.summary, "test_accuracy", out_dir / "accuracy.png")
    plots.plot_learning_curves(result.summary, "coreset_radius", out_dir / "radius.png")

    for strategy in config.strategies:
        final = [r for r in result.summary if r.strategy == strategy][-1]
        print(
            f"{strategy}: final mean test accuracy {final.mean_test_accuracy:.4f} "
            f"(+/- {final.std_test_accuracy:.4f}), radius {final.mean_coreset_radius:.4f} "
            f"at {final.labeled_count} labels over {final.trials} trials"
        )
    print(f"wrote metrics.csv, summary.csv, masks, splits, figures -> {out_dir}")
    return 0


def _cmd_bounds(args) -> int:
    z_values = _parse_float_list(args.z, "--z")
    if args.steps < 1:
        raise ValueError(f"--steps must be at least 1, got {args.steps}")
    if args.delta_min <= 0.0:
        raise ValueError(f"--delta-min must be positive, got {args.delta_min}")
    if args.delta_max < args.delta_min:
        raise ValueError(
            f"--delta-max must be at least --delta-min, got "
            f"{args.delta_max} < {args.delta_min}"
        )
    deltas = np.linspace(args.delta_min, args.delta_max, args.steps)
    params = BoundParams(lambda_c=args.lambda_c, lambda_eps=args.lambda_eps)
    rows = bound_curve_grid(z_values, deltas, params)
    dataio.write_bounds_csv(args.out, rows)

    from coreset_al import plots

    image = Path(args.out).with_suffix(".png")
    plots.plot_bound_curves(rows, image)
    print(f"wrote {len(rows)} grid rows -> {args.out} (figure: {image})")
    return 0


def _cmd_verify(args) -> int:
    report = verify_claims(
        tol_quadrature=args.tol_quadrature, tol_identity=args.tol_identity
    )
    width = max(len(check.name) for check in report.checks)
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(
            f"{check.name:<{width}}  {status}  max deviation {check.max_deviation:.3e} "
            f"(tolerance {check.tolerance:.1e}, {check.samples} samples)"
        )
    return 0 if report.all_passed else 1


# ----- experiment config files -------------------------------------------------

_CONFIG_KEYS = {
    "dataset": str,
    "n": int,
    "per_cluster": int,
    "std": float,
    "ring_radius": float,
    "class_count": int,
    "clusters_per_class": int,
    "initial_labeled": int,
    "test_fraction": float,
    "budget": int,
    "iterations": int,
    "strategy": str,
    "beam_width": int,
    "scaling_mode": str,
    "distance_batch_size": int,
    "trials": int,
    "base_seed": int,
    "learning_rate": float,
    "epochs": int,
    "train_batch_size": int,
    "optimizer": str,
    "target_train_accuracy": float,
}

_TRAIN_KEYS = {
    "learning_rate": "learning_rate",
    "epochs": "epochs",
    "train_batch_size": "batch_size",
    "optimizer": "optimizer",
    "target_train_accuracy": "target_train_accuracy",
}


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse ``key = value`` lines into typed values.

    Blank lines and ``#`` comments (full-line or trailing) are ignored.
    Unknown and duplicate keys are rejected. The ``strategy`` value may be
    a single name or a comma-separated list.
    """
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _CONFIG_KEYS:
            raise ValueError(
                f"{source}:{lineno}: unknown config key {key!r} "
                f"(known keys: {', '.join(sorted(_CONFIG_KEYS))})"
            )
        if key in values:
            raise ValueError(f"{source}:{lineno}: duplicate config key {key!r}")
        if not value:
            raise ValueError(f"{source}:{lineno}: empty value for {key!r}")
        caster = _CONFIG_KEYS[key]
        try:
            values[key] = caster(value)
        except ValueError:
            raise ValueError(
                f"{source}:{lineno}: cannot parse {value!r} as {caster.__name__} for {key!r}"
            ) from None
    return values


def load_config(path) -> ExperimentConfig:
    """Read an experiment config file into an :class:`ExperimentConfig`."""
    text = Path(path).read_text()
    values = parse_config_text(text, source=str(path))

    train_kwargs = {}
    for file_key, attr in _TRAIN_KEYS.items():
        if file_key in values:
            train_kwargs[attr] = values.pop(file_key)

    if "strategy" in values:
        names = tuple(s.strip() for s in values.pop("strategy").split(",") if s.strip())
        if not names:
            raise ValueError(f"{path}: strategy list is empty")
        values["strategies"] = names

    # dataset validity is enforced by ExperimentConfig; give file context here
    if "dataset" in values and values["dataset"] not in DATASETS:
        raise ValueError(
            f"{path}: unknown dataset {values['dataset']!r}; expected one of {DATASETS}"
        )
    if "optimizer" in train_kwargs and train_kwargs["optimizer"] not in OPTIMIZERS:
        raise ValueError(
            f"{path}: unknown optimizer {train_kwargs['optimizer']!r}; "
            f"expected one of {OPTIMIZERS}"
        )
    return ExperimentConfig(train=TrainConfig(**train_kwargs), **values)


def _parse_float_list(text: str, flag: str) -> list[float]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    if not parts:
        raise ValueError(f"{flag} needs at least one value")
    try:
        return [float(p) for p in parts]
    except ValueError:
        raise ValueError(f"{flag}: cannot parse {text!r} as comma-separated floats") from None


if __name__ == "__main__":
    sys.exit(main())
