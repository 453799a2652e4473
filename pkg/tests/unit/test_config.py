import json

import pytest

from dgprf.config import PRESETS, RunConfig, parse_bool, parse_widths
from dgprf.exceptions import ConfigError
from dgprf.kernels.features import OmegaStrategy
from dgprf.kernels.params import KernelFamily


def test_defaults():
    cfg = RunConfig()
    assert cfg.layers == 1
    assert cfg.n_rf == 100 and cfg.gp_per_layer == 3
    assert cfg.theta_freeze_iters == 12000
    assert cfg.omega_strategy == "var-fixed"
    assert cfg.schedule().switch_iter == 10000


def test_nested_and_dotted_dataset_keys():
    nested = RunConfig.from_dict({"dataset": {"path": "a.csv", "label_col": "y"}})
    dotted = RunConfig.from_dict({"dataset.path": "a.csv", "dataset.label_col": "y"})
    assert nested == dotted
    assert nested.dataset_label_col == "y"
    assert RunConfig.from_dict({"dataset.label_col": "2"}).dataset_label_col == 2


def test_unknown_key():
    with pytest.raises(ConfigError, match="unknown config key"):
        RunConfig.from_dict({"n_features": 5})


def test_bad_value():
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"layers": "many"})


def test_overlay_keeps_base_values():
    base = RunConfig.from_dict({"layers": 3, "seed": 9})
    cfg = RunConfig.from_dict({"seed": 4}, base)
    assert (cfg.layers, cfg.seed) == (3, 4)


def test_file_round_trip(tmp_path):
    cfg = RunConfig.from_dict({"layers": 2, "n_rf": [20, 10], "wall_clock": "false"})
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert RunConfig.from_file(path) == cfg


def test_from_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_file(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        RunConfig.from_file(bad)
    arr = tmp_path / "list.json"
    arr.write_text("[1, 2]")
    with pytest.raises(ConfigError):
        RunConfig.from_file(arr)


def test_presets():
    mnist = RunConfig.preset("mnist")
    assert mnist.task == "classification"
    assert mnist.kernel == "arc"
    assert (mnist.n_rf, mnist.gp_per_layer, mnist.batch_size) == (500, 50, 1000)
    assert RunConfig.preset("uci").batch_size == 200
    assert set(PRESETS) == {"uci", "mnist"}
    with pytest.raises(ConfigError):
        RunConfig.preset("imagenet")


def test_architecture_from_config():
    cfg = RunConfig.from_dict(
        {"layers": 2, "gp_per_layer": 4, "n_rf": "30,20", "kernel": "arc", "omega_strategy": "prior-fixed"}
    )
    spec = cfg.architecture(d_in=5, d_out=1)
    assert spec.n_rf == (30, 20)
    assert spec.gp_per_layer == (4,)
    assert spec.kernel is KernelFamily.ARC_COSINE
    assert spec.omega_strategy is OmegaStrategy.PRIOR_FIXED


def test_validate_requires_existing_dataset(tmp_path):
    missing = tmp_path / "absent.csv"
    with pytest.raises(ConfigError, match="absent.csv"):
        RunConfig.from_dict({"dataset.path": str(missing)}).validate()
    with pytest.raises(ConfigError):
        RunConfig().validate()
    RunConfig().validate(require_dataset=False)


@pytest.mark.parametrize(
    "data",
    [
        {"task": "ranking"},
        {"kernel": "matern"},
        {"omega_strategy": "learned"},
        {"test_fraction": 1.0},
        {"seed": -1},
        {"theta_freeze_iters": 30000},
        {"layers": 0},
        {"task": "classification", "dataset.n_classes": 1},
    ],
)
def test_validate_rejects(data):
    with pytest.raises(ConfigError):
        RunConfig.from_dict(data).validate(require_dataset=False)


def test_validate_rejects_file_as_out_dir(tmp_path):
    target = tmp_path / "file"
    target.write_text("x")
    with pytest.raises(ConfigError):
        RunConfig.from_dict({"out_dir": str(target)}).validate(require_dataset=False)


def test_parsers():
    assert parse_bool("Yes") is True
    assert parse_bool("0") is False
    with pytest.raises(ValueError):
        parse_bool("maybe")
    assert parse_widths("3") == 3
    assert parse_widths("3,4") == (3, 4)
    assert parse_widths([5, 6]) == (5, 6)
