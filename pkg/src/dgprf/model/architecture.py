"""Static description of a DGP architecture.

Layer l (0-based, N_h layers in total) maps its input H^(l) to
F^(l+1) = Φ^(l)(H^(l) Ω^(l)) W^(l), where H^(0) = X and, for l >= 1,
H^(l) = F^(l) or [F^(l) | X] when inputs are fed forward.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
from enum import Enum
from typing import Any

from dgprf.exceptions import ConfigError
from dgprf.kernels.features import OmegaStrategy, feature_count
from dgprf.kernels.params import KernelFamily
from dgprf.model.likelihoods import LikelihoodKind, LikelihoodSpec

__all__ = ["Task", "LayerShape", "ArchitectureSpec", "UCI_HIDDEN", "MNIST_HIDDEN"]

# (n_rf, gp_per_layer)
UCI_HIDDEN = (100, 3)
MNIST_HIDDEN = (500, 50)


class Task(str, Enum):
    """Prediction task; classification uses a softmax over ``d_out`` classes."""

    REGRESSION = "regression"
    CLASSIFICATION = "classification"


@dataclass(frozen=True)
class LayerShape:
    """Dimensions of one layer.

    Attributes:
        d_in: Columns of H^(l) (rows of Ω^(l)).
        n_rf: Number of spectral frequencies N_RF^(l).
        n_features: Columns of Φ^(l) (rows of W^(l)).
        d_out: Columns of F^(l+1).
    """

    d_in: int
    n_rf: int
    n_features: int
    d_out: int


def _as_tuple(value: int | Sequence[int], length: int, name: str) -> tuple[int, ...]:
    if isinstance(value, int):
        return (value,) * length
    values = tuple(int(v) for v in value)
    if len(values) != length:
        raise ConfigError(f"{name} needs {length} entries, got {len(values)}")
    return values


@dataclass(frozen=True)
class ArchitectureSpec:
    """Architecture of a random-feature DGP.

    Attributes:
        d_in: Input dimension D_in.
        d_out: Output dimension D_out (number of classes for classification).
        n_layers: Number of GP layers N_h >= 1.
        gp_per_layer: Hidden widths D_F^(1..N_h-1); D_F^(N_h) = d_out.
        n_rf: N_RF^(l) for every layer.
        kernel: Covariance family shared by all layers.
        kernel_order: Arc-cosine order (1 for ReLU features).
        omega_strategy: Treatment of Ω.
        feedforward_inputs: Concatenate X to every hidden layer input.
        task: Regression or classification.
    """

    d_in: int
    d_out: int
    n_layers: int = 1
    gp_per_layer: tuple[int, ...] = ()
    n_rf: tuple[int, ...] = (100,)
    kernel: KernelFamily = KernelFamily.RBF
    kernel_order: int = 1
    omega_strategy: OmegaStrategy = OmegaStrategy.VAR_FIXED
    feedforward_inputs: bool = False
    task: Task = Task.REGRESSION

    def __post_init__(self) -> None:
        object.__setattr__(self, "kernel", KernelFamily(self.kernel))
        object.__setattr__(self, "omega_strategy", OmegaStrategy(self.omega_strategy))
        object.__setattr__(self, "task", Task(self.task))
        object.__setattr__(self, "gp_per_layer", tuple(int(v) for v in self.gp_per_layer))
        object.__setattr__(self, "n_rf", tuple(int(v) for v in self.n_rf))
        if self.n_layers < 1:
            raise ConfigError(f"n_layers must be >= 1, got {self.n_layers}")
        if len(self.gp_per_layer) != self.n_layers - 1:
            raise ConfigError(
                f"gp_per_layer needs {self.n_layers - 1} hidden widths, got {len(self.gp_per_layer)}"
            )
        if len(self.n_rf) != self.n_layers:
            raise ConfigError(f"n_rf needs {self.n_layers} entries, got {len(self.n_rf)}")
        counts = (self.d_in, self.d_out) + self.gp_per_layer + self.n_rf
        if min(counts) < 1:
            raise ConfigError(f"all dimensions must be >= 1, got {counts}")
        if self.task is Task.CLASSIFICATION and self.d_out < 2:
            raise ConfigError("classification needs d_out = n_classes >= 2")
        if self.kernel is KernelFamily.ARC_COSINE and self.kernel_order != 1:
            raise ConfigError(
                "only arc-cosine order 1 is trainable (order 0 has zero gradients)"
            )

    @classmethod
    def build(
        cls,
        d_in: int,
        d_out: int,
        n_layers: int = 1,
        gp_per_layer: int | Sequence[int] = UCI_HIDDEN[1],
        n_rf: int | Sequence[int] = UCI_HIDDEN[0],
        **kwargs: Any,
    ) -> ArchitectureSpec:
        """Construct from scalar or per-layer widths.

        Args:
            d_in: Input dimension.
            d_out: Output dimension.
            n_layers: Number of GP layers.
            gp_per_layer: Hidden width shared by all hidden layers, or one per hidden layer.
            n_rf: Feature count shared by all layers, or one per layer.
            **kwargs: Remaining ArchitectureSpec fields.
        """
        return cls(
            d_in=d_in,
            d_out=d_out,
            n_layers=n_layers,
            gp_per_layer=_as_tuple(gp_per_layer, n_layers - 1, "gp_per_layer"),
            n_rf=_as_tuple(n_rf, n_layers, "n_rf"),
            **kwargs,
        )

    @property
    def likelihood(self) -> LikelihoodSpec:
        """Gaussian for regression, softmax over ``d_out`` classes for classification."""
        if self.task is Task.CLASSIFICATION:
            return LikelihoodSpec(LikelihoodKind.SOFTMAX, n_classes=self.d_out)
        return LikelihoodSpec(LikelihoodKind.GAUSSIAN)

    @property
    def gp_counts(self) -> tuple[int, ...]:
        """D_F^(1), ..., D_F^(N_h)."""
        return self.gp_per_layer + (self.d_out,)

    def layer_input_dim(self, layer: int) -> int:
        if layer == 0:
            return self.d_in
        hidden = self.gp_counts[layer - 1]
        return hidden + self.d_in if self.feedforward_inputs else hidden

    def layer_shapes(self) -> list[LayerShape]:
        return [
            LayerShape(
                d_in=self.layer_input_dim(layer),
                n_rf=self.n_rf[layer],
                n_features=feature_count(self.kernel, self.n_rf[layer]),
                d_out=self.gp_counts[layer],
            )
            for layer in range(self.n_layers)
        ]

    def to_dict(self) -> dict[str, Any]:
        return {
            "d_in": self.d_in,
            "d_out": self.d_out,
            "n_layers": self.n_layers,
            "gp_per_layer": list(self.gp_per_layer),
            "n_rf": list(self.n_rf),
            "kernel": self.kernel.value,
            "kernel_order": self.kernel_order,
            "omega_strategy": self.omega_strategy.value,
            "feedforward_inputs": self.feedforward_inputs,
            "task": self.task.value,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ArchitectureSpec:
        return cls(
            d_in=int(data["d_in"]),
            d_out=int(data["d_out"]),
            n_layers=int(data["n_layers"]),
            gp_per_layer=tuple(data["gp_per_layer"]),
            n_rf=tuple(data["n_rf"]),
            kernel=KernelFamily(data["kernel"]),
            kernel_order=int(data.get("kernel_order", 1)),
            omega_strategy=OmegaStrategy(data["omega_strategy"]),
            feedforward_inputs=bool(data["feedforward_inputs"]),
            task=Task(data["task"]),
        )
