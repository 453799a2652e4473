"""Training schedule for the random-feature DGP.

The loop follows a fixed recipe:

- Θ (and the likelihood noise λ) stay frozen for ``theta_freeze_iters``
  iterations while q(W) and q(Ω) settle.
- The ELBO uses ``mc_samples_phase1`` MC samples until the phase switch
  (half of ``total_iters`` unless set), then ``mc_samples_phase2``.
- Minibatches come from a fresh permutation every epoch; the last batch of
  an epoch may be short.
- Every ``metrics_every`` iterations a MetricsRow is emitted with held-out
  error and MNLL.

Evaluation draws from its own derived stream, so the metrics cadence never
changes the training trajectory.
"""

from __future__ import annotations

import logging
import time
from collections.abc import Callable, Iterator, Mapping
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from dgprf.data.dataset import Dataset
from dgprf.data.metrics import metrics
from dgprf.exceptions import ConfigError
from dgprf.inference.elbo import ElboEstimate, elbo_and_grad
from dgprf.inference.optim import AdamState, adam_step
from dgprf.model.dgp import DgpModel, predict
from dgprf.numerics.rng import Rng

logger = logging.getLogger(__name__)

__all__ = [
    "TrainSchedule",
    "MetricsRow",
    "TrainState",
    "TrainResult",
    "MetricsCsvWriter",
    "minibatches",
    "train",
    "smoothed_elbo",
    "rank_by_elbo",
    "METRICS_COLUMNS",
    "EVAL_STREAM",
]

METRICS_COLUMNS = ["iter", "elapsed_ms", "elbo", "metric", "mnll"]
# Spawn-key tag of the evaluation stream.
EVAL_STREAM = 1


@dataclass(frozen=True)
class TrainSchedule:
    """Iteration budget and phase boundaries.

    Attributes:
        total_iters: Number of Adam steps.
        theta_freeze_iters: Leading iterations during which Θ and λ are not updated.
        mc_samples_phase1: MC samples before the phase switch.
        mc_samples_phase2: MC samples after it.
        mc_phase_switch: Last iteration of phase 1; defaults to ``total_iters // 2``.
        batch_size: Minibatch size m.
        learning_rate: Adam step size.
        metrics_every: Cadence of MetricsRow emission (0 disables all but the final row).
        eval_mc: MC samples used for held-out predictions.
        checkpoint_every: Cadence of the checkpoint callback (0 = never during training).
    """

    total_iters: int
    theta_freeze_iters: int = 12000
    mc_samples_phase1: int = 1
    mc_samples_phase2: int = 100
    mc_phase_switch: int | None = None
    batch_size: int = 200
    learning_rate: float = 0.01
    metrics_every: int = 100
    eval_mc: int = 100
    checkpoint_every: int = 0

    def __post_init__(self) -> None:
        if self.total_iters < 1:
            raise ConfigError(f"total_iters must be >= 1, got {self.total_iters}")
        if not 0 <= self.theta_freeze_iters <= self.total_iters:
            raise ConfigError(
                f"theta_freeze_iters must lie in [0, total_iters={self.total_iters}], "
                f"got {self.theta_freeze_iters}"
            )
        if self.mc_phase_switch is not None and not 0 <= self.mc_phase_switch <= self.total_iters:
            raise ConfigError(f"mc_phase_switch out of range: {self.mc_phase_switch}")
        for name in ("mc_samples_phase1", "mc_samples_phase2", "batch_size", "eval_mc"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1, got {getattr(self, name)}")
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.metrics_every < 0 or self.checkpoint_every < 0:
            raise ConfigError("metrics_every and checkpoint_every must be >= 0")

    @property
    def switch_iter(self) -> int:
        return self.total_iters // 2 if self.mc_phase_switch is None else self.mc_phase_switch

    def mc_samples(self, iteration: int) -> int:
        """MC samples used at 1-based ``iteration``."""
        return self.mc_samples_phase1 if iteration <= self.switch_iter else self.mc_samples_phase2

    def theta_frozen(self, iteration: int) -> bool:
        return iteration <= self.theta_freeze_iters


@dataclass(frozen=True)
class MetricsRow:
    """One line of the metrics file.

    ``elbo`` is the mean minibatch ELBO since the previous row.
    """

    iter: int
    elapsed_ms: int
    elbo: float
    metric: float
    mnll: float


@dataclass
class TrainState:
    """Mutable loop state; snapshots are handed to callbacks, never shared."""

    model: DgpModel
    adam: AdamState
    iteration: int = 0
    elbo_trace: list[float] = field(default_factory=list)


@dataclass
class TrainResult:
    """Outcome of :func:`train`.

    Attributes:
        model: Final model.
        adam: Final optimizer state.
        elbo_trace: Minibatch ELBO of every iteration.
        rows: Emitted metrics rows.
        last_estimate: ELBO estimate of the final iteration.
        elapsed_s: Wall time of the loop.
    """

    model: DgpModel
    adam: AdamState
    elbo_trace: np.ndarray
    rows: list[MetricsRow]
    last_estimate: ElboEstimate
    elapsed_s: float

    @property
    def final_row(self) -> MetricsRow:
        return self.rows[-1]


class MetricsCsvWriter:
    """Append MetricsRows to a CSV with header ``iter,elapsed_ms,elbo,metric,mnll``.

    The file is truncated when the writer is created.
    """

    def __init__(self, path: str | Path) -> None:
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        pd.DataFrame(columns=METRICS_COLUMNS).to_csv(self.path, index=False)

    def __call__(self, row: MetricsRow) -> None:
        frame = pd.DataFrame([asdict(row)], columns=METRICS_COLUMNS)
        frame.to_csv(self.path, mode="a", header=False, index=False)


def minibatches(n: int, batch_size: int, rng: Rng) -> Iterator[np.ndarray]:
    """Endless stream of index batches, without replacement within an epoch."""
    if n < 1:
        raise ValueError("cannot draw minibatches from an empty dataset")
    while True:
        order = rng.permutation(n)
        for start in range(0, n, batch_size):
            yield order[start : start + batch_size]


def _evaluate(
    model: DgpModel, data: Dataset, eval_mc: int, rng: Rng
) -> tuple[float, float]:
    return metrics(predict(model, data.X, eval_mc, rng), data.Y)


def train(
    model: DgpModel,
    dataset: Dataset,
    schedule: TrainSchedule,
    rng: Rng,
    metrics_sink: Callable[[MetricsRow], None] | None = None,
    test: Dataset | None = None,
    wall_clock: bool = True,
    checkpoint_sink: Callable[[TrainState], None] | None = None,
    adam: AdamState | None = None,
) -> TrainResult:
    """Maximize the ELBO with Adam under ``schedule``.

    Args:
        model: Initial model.
        dataset: Training data (standardized).
        schedule: Budget, phases and cadences.
        rng: Run stream; minibatch order and weight draws come from it.
        metrics_sink: Receives every MetricsRow (e.g. a MetricsCsvWriter).
        test: Held-out data scored in each row; the training data when None.
        wall_clock: Record real elapsed time; when False ``elapsed_ms`` is 0,
            which makes metrics files reproducible byte for byte.
        checkpoint_sink: Called every ``schedule.checkpoint_every`` iterations.
        adam: Optimizer state to resume from.

    Returns:
        TrainResult.
    """
    if dataset.n == 0:
        raise ValueError("cannot train on an empty dataset")
    if dataset.d_in != model.spec.d_in or dataset.d_out != model.spec.d_out:
        raise ConfigError(
            f"model expects {model.spec.d_in} inputs / {model.spec.d_out} outputs, "
            f"dataset has {dataset.d_in} / {dataset.d_out}"
        )
    eval_data = test if test is not None else dataset
    eval_rng = rng.derive(EVAL_STREAM)
    state = TrainState(
        model=model,
        adam=adam or AdamState.create(model.parameters(), schedule.learning_rate),
    )
    hyper_keys = model.hyperparameter_keys()
    batches = minibatches(dataset.n, schedule.batch_size, rng)
    rows: list[MetricsRow] = []
    window: list[float] = []
    start = time.perf_counter()
    estimate: ElboEstimate | None = None

    for iteration in range(1, schedule.total_iters + 1):
        idx = next(batches)
        n_mc = schedule.mc_samples(iteration)
        estimate, grads = elbo_and_grad(
            state.model, (dataset.X[idx], dataset.Y[idx]), dataset.n, n_mc, rng
        )
        frozen = hyper_keys if schedule.theta_frozen(iteration) else ()
        params = adam_step(state.adam, state.model.parameters(), grads, frozen=frozen)
        state.model = state.model.with_parameters(params)
        state.iteration = iteration
        state.elbo_trace.append(estimate.total)
        window.append(estimate.total)

        if iteration == schedule.theta_freeze_iters and iteration < schedule.total_iters:
            logger.info("Iteration %d: releasing kernel hyperparameters", iteration)
        if iteration == schedule.switch_iter and iteration < schedule.total_iters:
            logger.info(
                "Iteration %d: switching to %d MC samples", iteration, schedule.mc_samples_phase2
            )

        emit = iteration == schedule.total_iters or (
            schedule.metrics_every > 0 and iteration % schedule.metrics_every == 0
        )
        if emit:
            metric, mnll = _evaluate(state.model, eval_data, schedule.eval_mc, eval_rng)
            elapsed_ms = int(round((time.perf_counter() - start) * 1000)) if wall_clock else 0
            row = MetricsRow(iteration, elapsed_ms, float(np.mean(window)), metric, mnll)
            window = []
            rows.append(row)
            logger.info(
                "iter=%d elbo=%.4f metric=%.4f mnll=%.4f", iteration, row.elbo, metric, mnll
            )
            if metrics_sink is not None:
                metrics_sink(row)
        if (
            checkpoint_sink is not None
            and schedule.checkpoint_every > 0
            and iteration % schedule.checkpoint_every == 0
        ):
            checkpoint_sink(state)

    assert estimate is not None
    return TrainResult(
        model=state.model,
        adam=state.adam,
        elbo_trace=np.asarray(state.elbo_trace),
        rows=rows,
        last_estimate=estimate,
        elapsed_s=time.perf_counter() - start,
    )


def smoothed_elbo(trace: np.ndarray | list[float], window: int = 500) -> np.ndarray:
    """Trailing moving average of an ELBO trace (shorter windows at the start)."""
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    series = pd.Series(np.asarray(trace, dtype=np.float64))
    return series.rolling(window, min_periods=1).mean().to_numpy()


def rank_by_elbo(traces: Mapping[str, np.ndarray | list[float]], window: int = 500) -> list[str]:
    """Model names ordered best first by final smoothed ELBO (lowest negative ELBO)."""
    finals = {name: float(smoothed_elbo(trace, window)[-1]) for name, trace in traces.items()}
    return sorted(finals, key=lambda name: -finals[name])
