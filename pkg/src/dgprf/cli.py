"""Command-line interface for dgprf.

Subcommands:
    train         Fit a DGP to a CSV dataset; writes metrics.csv, checkpoint.json, summary.json.
    evaluate      Score a checkpoint on a CSV dataset; prints metric and MNLL as JSON.
    kernel-check  Random feature Gram error study; writes kernel_check.csv.
    mcmc-compare  Variational vs. Gibbs sampler on synthetic data; writes mcmc_compare.csv.

Exit codes: 0 success, 2 configuration or I/O error, 3 checkpoint error,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any

from dgprf.config import RunConfig
from dgprf.data.dataset import (
    CsvSchema,
    Dataset,
    Standardization,
    apply_standardization,
    load_csv,
    split,
)
from dgprf.data.metrics import metrics
from dgprf.exceptions import (
    CheckpointError,
    ConfigError,
    DataParseError,
    NumericalError,
    ShapeError,
)
from dgprf.inference.trainer import MetricsCsvWriter, TrainState, train
from dgprf.model.architecture import Task
from dgprf.model.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from dgprf.model.dgp import DgpModel, predict
from dgprf.numerics.rng import Rng

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECKPOINT = 3
EXIT_NUMERICAL = 4

# spawn-key tags of the run streams
TRAIN_STREAM = 0
INIT_STREAM = 2
EVAL_STREAM = 3


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("configuration (override JSON keys)")
    group.add_argument("--config", help="JSON config file")
    group.add_argument("--preset", choices=["uci", "mnist"], help="Start from a preset")
    for key, (attr, _, help_text) in RunConfig.keys().items():
        flag = "--" + key.replace(".", "-").replace("_", "-")
        group.add_argument(flag, dest=f"cfg_{attr}", default=None, help=f"{help_text} [{key}]")


def _resolve_config(args: argparse.Namespace) -> RunConfig:
    """Preset, then JSON file, then flags."""
    config = RunConfig.preset(args.preset) if args.preset else RunConfig()
    if args.config:
        config = RunConfig.from_file(args.config, base=config)
    overrides = {}
    for key, (attr, _, _) in RunConfig.keys().items():
        value = getattr(args, f"cfg_{attr}", None)
        if value is not None:
            overrides[key] = value
    return RunConfig.from_dict(overrides, base=config)


def _schema(config: RunConfig) -> CsvSchema:
    return CsvSchema(
        task=Task(config.task),
        label_cols=(config.dataset_label_col,),
        n_classes=config.dataset_n_classes,
    )


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def cmd_train(config: RunConfig) -> int:
    """Train on ``config.dataset_path`` and write the three run artifacts."""
    config.validate()
    data = load_csv(config.dataset_path, _schema(config))  # type: ignore[arg-type]
    train_set, test_set = split(data, config.test_fraction, config.seed)
    spec = config.architecture(train_set.d_in, train_set.d_out)
    schedule = config.schedule()

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    record = train_set.standardization.to_dict() if train_set.standardization else None
    metadata = {
        "label_col": config.dataset_label_col,
        "n_classes": train_set.n_classes,
        "config": config.to_dict(),
    }

    def _checkpoint(state: TrainState) -> Checkpoint:
        return Checkpoint(
            model=state.model,
            seed=config.seed,
            iteration=state.iteration,
            standardization=record,
            adam=state.adam.to_dict(),
            metadata=metadata,
        )

    def _save_intermediate(state: TrainState) -> None:
        save_checkpoint(out_dir / f"checkpoint_{state.iteration}.json", _checkpoint(state))

    print(f"Training {spec.n_layers}-layer DGP on {train_set.n} rows ({test_set.n} held out)")
    print(f"Kernel: {spec.kernel.value}, Ω: {spec.omega_strategy.value}, N_RF: {list(spec.n_rf)}")
    model = DgpModel.initialize(spec, Rng(config.seed, (INIT_STREAM,)))
    result = train(
        model,
        train_set,
        schedule,
        Rng(config.seed, (TRAIN_STREAM,)),
        metrics_sink=MetricsCsvWriter(out_dir / "metrics.csv"),
        test=test_set,
        wall_clock=config.wall_clock,
        checkpoint_sink=_save_intermediate,
    )
    final_state = TrainState(model=result.model, adam=result.adam, iteration=schedule.total_iters)
    save_checkpoint(out_dir / "checkpoint.json", _checkpoint(final_state))
    final = result.final_row
    summary = {
        "metric": final.metric,
        "metric_name": "error_rate" if spec.task is Task.CLASSIFICATION else "rmse",
        "mnll": final.mnll,
        "elbo": result.last_estimate.total,
        "wall_time_s": result.elapsed_s if config.wall_clock else 0.0,
        "iterations": schedule.total_iters,
        "seed": config.seed,
    }
    _write_json(out_dir / "summary.json", summary)
    print(f"Final {summary['metric_name']}: {final.metric:.4f}, MNLL: {final.mnll:.4f}")
    print(f"Artifacts written to: {out_dir}")
    return EXIT_OK


def cmd_evaluate(checkpoint_path: str, dataset_path: str, n_mc: int, seed: int = 0) -> int:
    """Print metric and MNLL of a checkpoint on a dataset as JSON."""
    if n_mc < 1:
        raise ConfigError(f"n_mc must be >= 1, got {n_mc}")
    if not Path(dataset_path).is_file():
        raise ConfigError(f"dataset file not found: {dataset_path}")
    checkpoint = load_checkpoint(checkpoint_path)
    spec = checkpoint.model.spec
    schema = CsvSchema(
        task=spec.task,
        label_cols=(checkpoint.metadata.get("label_col", -1),),
        n_classes=spec.d_out if spec.task is Task.CLASSIFICATION else None,
    )
    data = load_csv(dataset_path, schema)
    if data.d_in != spec.d_in or data.d_out != spec.d_out:
        raise CheckpointError(
            f"checkpoint expects {spec.d_in} inputs / {spec.d_out} outputs, "
            f"dataset has {data.d_in} / {data.d_out}"
        )
    if checkpoint.standardization is not None:
        try:
            data = apply_standardization(data, Standardization.from_dict(checkpoint.standardization))
        except (KeyError, TypeError, ShapeError) as e:
            raise CheckpointError(f"invalid standardization record: {e}") from e
    metric, mnll = _score(checkpoint.model, data, n_mc, Rng(seed, (EVAL_STREAM,)))
    print(json.dumps({"metric": metric, "mnll": mnll, "n_mc": n_mc, "n": data.n}))
    return EXIT_OK


def _score(model: DgpModel, data: Dataset, n_mc: int, rng: Rng) -> tuple[float, float]:
    return metrics(predict(model, data.X, n_mc, rng), data.Y)


def cmd_kernel_check(config: RunConfig, n_seeds: int = 10) -> int:
    """Write the Gram error study for both kernels."""
    from dgprf.kernels.audit import GRAM_STUDY_SIZES, gram_error_study

    config.validate(require_dataset=False)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    frame = gram_error_study(config.seed, GRAM_STUDY_SIZES, n_seeds=n_seeds)
    path = out_dir / "kernel_check.csv"
    frame.to_csv(path, index=False)
    medians = frame.groupby(["kernel", "n_rf"])["max_abs_error"].median()
    for (kernel, n_rf), value in medians.items():
        print(f"{kernel:>4} N_RF={n_rf:>6}: median max-abs error {value:.4f}")
    print(f"Results saved to: {path}")
    return EXIT_OK


def cmd_mcmc_compare(config: RunConfig, **settings: Any) -> int:
    """Variational vs. MCMC comparison on the synthetic dataset."""
    from dgprf.mcmc.compare import CompareSettings, run_comparison

    config.validate(require_dataset=False)
    compare_settings = CompareSettings(**{k: v for k, v in settings.items() if v is not None})
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = run_comparison(config.seed, config.schedule(), compare_settings)
    path = out_dir / "mcmc_compare.csv"
    result.table.to_csv(path, index=False)
    _write_json(out_dir / "mcmc_compare_summary.json", result.summary)
    for key, value in result.summary.items():
        if isinstance(value, float):
            print(f"{key}: {value:.4f}")
    print(f"Results saved to: {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dgprf",
        description="Deep Gaussian processes with random feature expansions",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Train on a regression CSV with the UCI preset
  dgprf train --preset uci --dataset-path data/powerplant.csv --out-dir runs/pp

  # Two-layer arc-cosine classifier from a JSON config, overriding the seed
  dgprf train --config mnist.json --seed 3

  # Score a checkpoint
  dgprf evaluate --checkpoint runs/pp/checkpoint.json --dataset-path data/powerplant.csv

  # Random feature accuracy study
  dgprf kernel-check --out-dir runs/kernels

  # Compare variational and MCMC posteriors on synthetic data
  dgprf mcmc-compare --out-dir runs/mcmc
        """,
    )
    parser.add_argument("--version", action="store_true", help="Print package version and exit")
    parser.add_argument("--verbose", action="store_true", help="Log progress (INFO)")
    parser.add_argument("--debug", action="store_true", help="Log details (DEBUG)")
    sub = parser.add_subparsers(dest="command")

    p_train = sub.add_parser("train", help="Train a model")
    _add_config_flags(p_train)

    p_eval = sub.add_parser("evaluate", help="Evaluate a checkpoint")
    p_eval.add_argument("--checkpoint", required=True, help="checkpoint.json from a train run")
    p_eval.add_argument("--dataset-path", required=True, help="CSV dataset file")
    p_eval.add_argument("--n-mc", type=int, default=100, help="MC samples (default: 100)")
    p_eval.add_argument("--seed", type=int, default=0, help="Seed of the prediction draw")

    p_kernel = sub.add_parser("kernel-check", help="Random feature Gram error study")
    _add_config_flags(p_kernel)
    p_kernel.add_argument("--n-seeds", type=int, default=10, help="Replicates per size")

    p_mcmc = sub.add_parser("mcmc-compare", help="Variational vs. MCMC on synthetic data")
    _add_config_flags(p_mcmc)
    p_mcmc.add_argument("--n-points", type=int, default=None, help="Synthetic points (default 50)")
    p_mcmc.add_argument("--mcmc-samples", type=int, default=None, help="Retained samples (default 100)")
    p_mcmc.add_argument("--burn-in", type=int, default=None, help="Discarded sweeps (default 500)")
    p_mcmc.add_argument("--thin", type=int, default=None, help="Sweeps per sample (default 5)")
    p_mcmc.add_argument("--grid-points", type=int, default=None, help="Grid size (default 100)")
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.WARNING
    if args.verbose:
        level = logging.INFO
    if args.debug:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(asctime)s %(name)s %(levelname)s: %(message)s")


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "train":
        return cmd_train(_resolve_config(args))
    if args.command == "evaluate":
        return cmd_evaluate(args.checkpoint, args.dataset_path, args.n_mc, args.seed)
    if args.command == "kernel-check":
        return cmd_kernel_check(_resolve_config(args), n_seeds=args.n_seeds)
    if args.command == "mcmc-compare":
        return cmd_mcmc_compare(
            _resolve_config(args),
            n_points=args.n_points,
            mcmc_samples=args.mcmc_samples,
            burn_in=args.burn_in,
            thin=args.thin,
            grid_points=args.grid_points,
        )
    raise ConfigError("a subcommand is required (train, evaluate, kernel-check, mcmc-compare)")


def main(argv: list[str] | None = None) -> int:
    """Entry point of the ``dgprf`` command.

    Returns:
        int: Process exit code.
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.version:
        from dgprf import __version__

        print(f"dgprf {__version__}")
        return EXIT_OK
    _configure_logging(args)
    try:
        return _dispatch(args)
    except CheckpointError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except NumericalError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, DataParseError, ShapeError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as e:
        print(f"Error: invalid input: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
