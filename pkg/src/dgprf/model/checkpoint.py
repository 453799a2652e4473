"""JSON checkpoints of a trained model.

A checkpoint is a single JSON document::

    {
      "format": "dgprf-checkpoint/1",
      "spec": {...ArchitectureSpec...},
      "layers": [{"log_sigma2": ..., "log_lengthscales": <array>, "w_mean": <array>, ...}],
      "noise_log_var": ...,
      "seed": ..., "iteration": ...,
      "standardization": {...} | null,
      "adam": {...} | null
    }

Arrays are stored as ``{"shape": [...], "data": [...]}`` with data in
row-major order. Floats are written with Python's shortest round-trip repr,
so save -> load is bit-exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from dgprf.exceptions import CheckpointError
from dgprf.kernels.features import SpectralBlock
from dgprf.kernels.params import KernelParams
from dgprf.model.architecture import ArchitectureSpec
from dgprf.model.dgp import DgpModel
from dgprf.numerics.gaussian import GaussianVariational

__all__ = [
    "CHECKPOINT_FORMAT",
    "Checkpoint",
    "encode_array",
    "decode_array",
    "model_to_dict",
    "model_from_dict",
    "save_checkpoint",
    "load_checkpoint",
]

CHECKPOINT_FORMAT = "dgprf-checkpoint/1"


def encode_array(values: np.ndarray) -> dict[str, Any]:
    arr = np.asarray(values, dtype=np.float64)
    return {"shape": list(arr.shape), "data": arr.ravel(order="C").tolist()}


def decode_array(obj: Any, name: str = "array") -> np.ndarray:
    """Inverse of :func:`encode_array`.

    Raises:
        CheckpointError: If the object is malformed or data length mismatches the shape.
    """
    try:
        shape = tuple(int(s) for s in obj["shape"])
        data = np.asarray(obj["data"], dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"malformed array '{name}': {e}") from e
    if data.ndim != 1 or data.size != int(np.prod(shape, dtype=np.int64)):
        raise CheckpointError(f"array '{name}' has {data.size} values for shape {shape}")
    return data.reshape(shape)


def model_to_dict(model: DgpModel) -> dict[str, Any]:
    layers = []
    for params, block, q in zip(model.theta, model.spectral, model.w_posterior):
        layers.append(
            {
                "log_sigma2": params.log_sigma2,
                "log_lengthscales": encode_array(params.log_lengthscales),
                "strategy": block.strategy.value,
                "frozen_noise": (
                    None if block.frozen_noise is None else encode_array(block.frozen_noise)
                ),
                "omega_mean": (
                    None if block.variational is None else encode_array(block.variational.mean)
                ),
                "omega_log_var": (
                    None if block.variational is None else encode_array(block.variational.log_var)
                ),
                "w_mean": encode_array(q.mean),
                "w_log_var": encode_array(q.log_var),
            }
        )
    return {
        "spec": model.spec.to_dict(),
        "layers": layers,
        "noise_log_var": model.noise_log_var,
    }


def model_from_dict(data: dict[str, Any]) -> DgpModel:
    """Rebuild a model; any inconsistency is reported as CheckpointError."""
    try:
        spec = ArchitectureSpec.from_dict(data["spec"])
        theta, spectral, w_posterior = [], [], []
        for i, layer in enumerate(data["layers"]):
            theta.append(
                KernelParams(
                    log_sigma2=float(layer["log_sigma2"]),
                    log_lengthscales=decode_array(layer["log_lengthscales"], f"log_lengthscales.{i}"),
                    family=spec.kernel,
                    order=spec.kernel_order,
                )
            )
            noise = layer.get("frozen_noise")
            q_omega = None
            if layer.get("omega_mean") is not None:
                q_omega = GaussianVariational(
                    decode_array(layer["omega_mean"], f"omega_mean.{i}"),
                    decode_array(layer["omega_log_var"], f"omega_log_var.{i}"),
                )
            spectral.append(
                SpectralBlock(
                    layer["strategy"],
                    frozen_noise=None if noise is None else decode_array(noise, f"frozen_noise.{i}"),
                    variational=q_omega,
                )
            )
            w_posterior.append(
                GaussianVariational(
                    decode_array(layer["w_mean"], f"w_mean.{i}"),
                    decode_array(layer["w_log_var"], f"w_log_var.{i}"),
                )
            )
        return DgpModel(spec, theta, spectral, w_posterior, float(data["noise_log_var"]))
    except CheckpointError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise CheckpointError(f"invalid checkpoint contents: {e}") from e


@dataclass
class Checkpoint:
    """A model plus the run bookkeeping needed to evaluate or resume it.

    Attributes:
        model: Trained model.
        seed: Run seed.
        iteration: Iterations completed.
        standardization: Standardization record of the training data (plain dict).
        adam: Optional optimizer state (plain dict).
        metadata: Free-form extras (task schema, config echo).
    """

    model: DgpModel
    seed: int
    iteration: int
    standardization: dict[str, Any] | None = None
    adam: dict[str, Any] | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        doc = {"format": CHECKPOINT_FORMAT}
        doc.update(model_to_dict(self.model))
        doc.update(
            {
                "seed": self.seed,
                "iteration": self.iteration,
                "standardization": self.standardization,
                "adam": self.adam,
                "metadata": self.metadata,
            }
        )
        return doc

    @classmethod
    def from_dict(cls, doc: dict[str, Any]) -> Checkpoint:
        if not isinstance(doc, dict) or doc.get("format") != CHECKPOINT_FORMAT:
            raise CheckpointError(f"not a {CHECKPOINT_FORMAT} document")
        model = model_from_dict(doc)
        try:
            return cls(
                model=model,
                seed=int(doc["seed"]),
                iteration=int(doc["iteration"]),
                standardization=doc.get("standardization"),
                adam=doc.get("adam"),
                metadata=dict(doc.get("metadata") or {}),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise CheckpointError(f"invalid checkpoint header: {e}") from e


def save_checkpoint(path: str | Path, checkpoint: Checkpoint) -> Path:
    """Write ``checkpoint`` as JSON, creating parent directories."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(checkpoint.to_dict(), allow_nan=False), encoding="utf-8")
    return path


def load_checkpoint(path: str | Path) -> Checkpoint:
    """Read a checkpoint written by :func:`save_checkpoint`.

    Raises:
        CheckpointError: If the file is missing, not JSON, or inconsistent.
    """
    path = Path(path)
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except OSError as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise CheckpointError(f"checkpoint {path} is not valid JSON: {e}") from e
    return Checkpoint.from_dict(doc)
