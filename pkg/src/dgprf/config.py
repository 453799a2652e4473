"""Run configuration shared by every CLI command.

A configuration is one JSON document. ``dataset.*`` keys may be written
nested (``{"dataset": {"path": ...}}``) or dotted (``{"dataset.path": ...}``).
Each key has a ``--kebab-case`` CLI flag that overrides it, e.g.
``dataset.path`` -> ``--dataset-path`` and ``theta_freeze_iters`` ->
``--theta-freeze-iters``.

Keys:
    dataset.path, dataset.label_col, dataset.n_classes, task, layers,
    gp_per_layer, n_rf, kernel, kernel_order, omega_strategy,
    feedforward_inputs, batch_size, learning_rate, total_iters,
    theta_freeze_iters, mc_phase_switch, mc_samples_phase1, mc_samples_phase2,
    seed, out_dir, metrics_every, test_fraction, eval_mc, wall_clock,
    checkpoint_every
"""

from __future__ import annotations

import json
from collections.abc import Callable, Mapping
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any

from dgprf.exceptions import ConfigError
from dgprf.inference.trainer import TrainSchedule
from dgprf.kernels.features import OmegaStrategy
from dgprf.kernels.params import KernelFamily
from dgprf.model.architecture import MNIST_HIDDEN, UCI_HIDDEN, ArchitectureSpec, Task

__all__ = ["RunConfig", "PRESETS", "parse_bool", "parse_widths"]


def parse_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    text = str(value).strip().lower()
    if text in {"1", "true", "yes", "on"}:
        return True
    if text in {"0", "false", "no", "off"}:
        return False
    raise ValueError(f"not a boolean: {value!r}")


def parse_widths(value: Any) -> int | tuple[int, ...]:
    """An int, a list of ints, or a comma-separated string of ints."""
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    if isinstance(value, str) and "," in value:
        return tuple(int(v) for v in value.split(",") if v.strip())
    return int(value)


def _optional(parse: Callable[[Any], Any]) -> Callable[[Any], Any]:
    def _parse(value: Any) -> Any:
        if value is None or (isinstance(value, str) and value.strip().lower() in {"", "none", "null"}):
            return None
        return parse(value)

    return _parse


def _label(value: Any) -> str | int:
    if isinstance(value, int):
        return value
    text = str(value)
    return int(text) if text.lstrip("-").isdigit() else text


def _key(name: str, parse: Callable[[Any], Any], help_text: str) -> dict[str, Any]:
    return {"key": name, "parse": parse, "help": help_text}


@dataclass(frozen=True)
class RunConfig:
    """Every setting of a run; see the module docstring for key names."""

    dataset_path: str | None = field(
        default=None, metadata=_key("dataset.path", _optional(str), "CSV dataset file")
    )
    dataset_label_col: str | int = field(
        default=-1,
        metadata=_key("dataset.label_col", _label, "label column name or 0-based index"),
    )
    dataset_n_classes: int | None = field(
        default=None, metadata=_key("dataset.n_classes", _optional(int), "number of classes")
    )
    task: str = field(default="regression", metadata=_key("task", str, "regression|classification"))
    layers: int = field(default=1, metadata=_key("layers", int, "number of GP layers"))
    gp_per_layer: int | tuple[int, ...] = field(
        default=UCI_HIDDEN[1], metadata=_key("gp_per_layer", parse_widths, "hidden GP width(s)")
    )
    n_rf: int | tuple[int, ...] = field(
        default=UCI_HIDDEN[0], metadata=_key("n_rf", parse_widths, "random features per layer")
    )
    kernel: str = field(default="rbf", metadata=_key("kernel", str, "rbf|arc"))
    kernel_order: int = field(default=1, metadata=_key("kernel_order", int, "arc-cosine order"))
    omega_strategy: str = field(
        default="var-fixed",
        metadata=_key("omega_strategy", str, "prior-fixed|var-fixed|var-resampled"),
    )
    feedforward_inputs: bool = field(
        default=False, metadata=_key("feedforward_inputs", parse_bool, "feed X to hidden layers")
    )
    batch_size: int = field(default=200, metadata=_key("batch_size", int, "minibatch size"))
    learning_rate: float = field(default=0.01, metadata=_key("learning_rate", float, "Adam step"))
    total_iters: int = field(default=20000, metadata=_key("total_iters", int, "iterations"))
    theta_freeze_iters: int = field(
        default=12000, metadata=_key("theta_freeze_iters", int, "iterations with Θ frozen")
    )
    mc_phase_switch: int | None = field(
        default=None,
        metadata=_key("mc_phase_switch", _optional(int), "last low-MC iteration (default half)"),
    )
    mc_samples_phase1: int = field(
        default=1, metadata=_key("mc_samples_phase1", int, "MC samples before the switch")
    )
    mc_samples_phase2: int = field(
        default=100, metadata=_key("mc_samples_phase2", int, "MC samples after the switch")
    )
    seed: int = field(default=0, metadata=_key("seed", int, "run seed"))
    out_dir: str = field(default="runs", metadata=_key("out_dir", str, "output directory"))
    metrics_every: int = field(
        default=100, metadata=_key("metrics_every", int, "metrics cadence in iterations")
    )
    test_fraction: float = field(
        default=0.2, metadata=_key("test_fraction", float, "held-out share of rows")
    )
    eval_mc: int = field(default=100, metadata=_key("eval_mc", int, "MC samples for evaluation"))
    wall_clock: bool = field(
        default=True, metadata=_key("wall_clock", parse_bool, "record elapsed time")
    )
    checkpoint_every: int = field(
        default=0, metadata=_key("checkpoint_every", int, "intermediate checkpoint cadence")
    )

    @staticmethod
    def keys() -> dict[str, tuple[str, Callable[[Any], Any], str]]:
        """Map of config key -> (attribute, parser, help)."""
        return {f.metadata["key"]: (f.name, f.metadata["parse"], f.metadata["help"]) for f in fields(RunConfig)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base: RunConfig | None = None) -> RunConfig:
        """Overlay ``data`` on ``base`` (defaults when None).

        Raises:
            ConfigError: On unknown keys or unparsable values.
        """
        flat: dict[str, Any] = {}
        for key, value in data.items():
            if key == "dataset" and isinstance(value, Mapping):
                for sub, sub_value in value.items():
                    flat[f"dataset.{sub}"] = sub_value
            else:
                flat[key] = value
        table = cls.keys()
        updates: dict[str, Any] = {}
        for key, value in flat.items():
            if key not in table:
                raise ConfigError(f"unknown config key '{key}'")
            attr, parse, _ = table[key]
            try:
                updates[attr] = parse(value)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"invalid value for '{key}': {value!r} ({e})") from e
        return replace(base or cls(), **updates)

    @classmethod
    def from_file(cls, path: str | Path, base: RunConfig | None = None) -> RunConfig:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as e:
            raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        return cls.from_dict(data, base)

    @classmethod
    def preset(cls, name: str) -> RunConfig:
        if name not in PRESETS:
            raise ConfigError(f"unknown preset '{name}' (choose from {', '.join(PRESETS)})")
        return cls.from_dict(PRESETS[name])

    def to_dict(self) -> dict[str, Any]:
        """Dotted-key document accepted by :meth:`from_dict`."""
        data = asdict(self)
        out = {}
        for key, (attr, _, _) in self.keys().items():
            value = data[attr]
            out[key] = list(value) if isinstance(value, tuple) else value
        return out

    def architecture(self, d_in: int, d_out: int) -> ArchitectureSpec:
        return ArchitectureSpec.build(
            d_in=d_in,
            d_out=d_out,
            n_layers=self.layers,
            gp_per_layer=self.gp_per_layer,
            n_rf=self.n_rf,
            kernel=KernelFamily(self.kernel),
            kernel_order=self.kernel_order,
            omega_strategy=OmegaStrategy(self.omega_strategy),
            feedforward_inputs=self.feedforward_inputs,
            task=Task(self.task),
        )

    def schedule(self) -> TrainSchedule:
        return TrainSchedule(
            total_iters=self.total_iters,
            theta_freeze_iters=self.theta_freeze_iters,
            mc_samples_phase1=self.mc_samples_phase1,
            mc_samples_phase2=self.mc_samples_phase2,
            mc_phase_switch=self.mc_phase_switch,
            batch_size=self.batch_size,
            learning_rate=self.learning_rate,
            metrics_every=self.metrics_every,
            eval_mc=self.eval_mc,
            checkpoint_every=self.checkpoint_every,
        )

    def validate(self, require_dataset: bool = True) -> RunConfig:
        """Check every value before any side effect.

        Args:
            require_dataset: Whether ``dataset.path`` must name an existing file.

        Returns:
            self, for chaining.

        Raises:
            ConfigError: On the first invalid value.
        """
        for name, enum in (("task", Task), ("kernel", KernelFamily), ("omega_strategy", OmegaStrategy)):
            allowed = [m.value for m in enum]
            if getattr(self, name) not in allowed:
                raise ConfigError(f"{name} must be one of {allowed}, got {getattr(self, name)!r}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")
        if not 0 <= self.seed < 2**64:
            raise ConfigError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.task == Task.CLASSIFICATION.value and self.dataset_n_classes is not None:
            if self.dataset_n_classes < 2:
                raise ConfigError(f"dataset.n_classes must be >= 2, got {self.dataset_n_classes}")
        if require_dataset:
            if not self.dataset_path:
                raise ConfigError("dataset.path is required")
            if not Path(self.dataset_path).is_file():
                raise ConfigError(f"dataset file not found: {self.dataset_path}")
        out = Path(self.out_dir)
        if out.exists() and not out.is_dir():
            raise ConfigError(f"out_dir exists and is not a directory: {out}")
        # dimensions are checked against a placeholder shape; real ones come from the data
        self.architecture(d_in=1, d_out=max(2, self.dataset_n_classes or 2))
        self.schedule()
        return self


PRESETS: dict[str, dict[str, Any]] = {
    "uci": {
        "n_rf": UCI_HIDDEN[0],
        "gp_per_layer": UCI_HIDDEN[1],
        "batch_size": 200,
        "learning_rate": 0.01,
        "theta_freeze_iters": 12000,
        "total_iters": 20000,
    },
    "mnist": {
        "task": "classification",
        "dataset.n_classes": 10,
        "layers": 2,
        "kernel": "arc",
        "n_rf": MNIST_HIDDEN[0],
        "gp_per_layer": MNIST_HIDDEN[1],
        "batch_size": 1000,
        "learning_rate": 0.001,
        "theta_freeze_iters": 12000,
        "total_iters": 20000,
    },
}
