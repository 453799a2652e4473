#!/usr/bin/env python
"""Pick the number of GP layers by the smoothed training ELBO.

Trains one model per depth on the full (standardized) dataset and ranks the
depths by the moving average of the minibatch ELBO at the end of training.
Held-out error is reported alongside for reference.

Example:
    python scripts/depth_model_selection.py --dataset-path data/protein.csv --max-layers 4
"""

from __future__ import annotations

import argparse
from dataclasses import replace

from dgprf.cli import INIT_STREAM, TRAIN_STREAM
from dgprf.config import RunConfig
from dgprf.data.dataset import CsvSchema, load_csv, split
from dgprf.inference.trainer import TrainResult, rank_by_elbo, train
from dgprf.model.architecture import Task
from dgprf.model.dgp import DgpModel
from dgprf.numerics.rng import Rng


def train_depths(config: RunConfig, max_layers: int) -> dict[str, TrainResult]:
    schema = CsvSchema(
        task=Task(config.task),
        label_cols=(config.dataset_label_col,),
        n_classes=config.dataset_n_classes,
    )
    data = load_csv(config.dataset_path, schema)  # type: ignore[arg-type]
    train_set, test_set = split(data, config.test_fraction, config.seed)
    results = {}
    for layers in range(1, max_layers + 1):
        run = replace(config, layers=layers)
        spec = run.architecture(train_set.d_in, train_set.d_out)
        model = DgpModel.initialize(spec, Rng(config.seed, (INIT_STREAM,)))
        results[f"{layers}-layer"] = train(
            model,
            train_set,
            run.schedule(),
            Rng(config.seed, (TRAIN_STREAM,)),
            test=test_set,
            wall_clock=False,
        )
    return results


def main() -> None:
    parser = argparse.ArgumentParser(description="Depth selection by smoothed ELBO")
    parser.add_argument("--config", help="JSON run config")
    parser.add_argument("--dataset-path", help="CSV dataset (overrides the config)")
    parser.add_argument("--max-layers", type=int, default=3, help="Deepest model (default: 3)")
    parser.add_argument("--window", type=int, default=500, help="ELBO smoothing window")
    args = parser.parse_args()

    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    if args.dataset_path:
        config = RunConfig.from_dict({"dataset.path": args.dataset_path}, base=config)
    config.validate()

    results = train_depths(config, args.max_layers)
    ranking = rank_by_elbo({name: r.elbo_trace for name, r in results.items()}, args.window)

    print(f"\n{'Rank':<6} {'Model':<10} {'Metric':<10} {'MNLL':<10}")
    print("=" * 40)
    for rank, name in enumerate(ranking, 1):
        final = results[name].final_row
        print(f"{rank:<6} {name:<10} {final.metric:<10.4f} {final.mnll:<10.4f}")
    print("=" * 40)
    print(f"Selected: {ranking[0]}")


if __name__ == "__main__":  # pragma: no cover
    main()
