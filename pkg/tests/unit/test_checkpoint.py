import json

import numpy as np
import pytest

from dgprf.exceptions import CheckpointError
from dgprf.kernels.features import OmegaStrategy
from dgprf.model.checkpoint import (
    CHECKPOINT_FORMAT,
    Checkpoint,
    decode_array,
    encode_array,
    load_checkpoint,
    save_checkpoint,
)
from dgprf.model.dgp import predict
from dgprf.numerics.rng import Rng


@pytest.mark.parametrize("strategy", list(OmegaStrategy))
def test_round_trip_is_bit_exact(tmp_path, make_model, strategy):
    model = make_model(strategy=strategy)
    path = save_checkpoint(tmp_path / "sub" / "ckpt.json", Checkpoint(model, seed=3, iteration=17))
    loaded = load_checkpoint(path)
    assert loaded.seed == 3 and loaded.iteration == 17
    assert loaded.model.spec == model.spec
    for key, value in model.parameters().items():
        np.testing.assert_array_equal(loaded.model.parameters()[key], value)
    X = np.random.default_rng(0).standard_normal((6, 2))
    a = predict(model, X, 10, Rng(1)).samples
    b = predict(loaded.model, X, 10, Rng(1)).samples
    np.testing.assert_array_equal(a, b)


def test_document_carries_format_tag(tmp_path, make_model):
    path = save_checkpoint(tmp_path / "c.json", Checkpoint(make_model(), 0, 0))
    assert json.loads(path.read_text())["format"] == CHECKPOINT_FORMAT


def test_missing_file(tmp_path):
    with pytest.raises(CheckpointError):
        load_checkpoint(tmp_path / "absent.json")


def test_truncated_file(tmp_path, make_model):
    path = save_checkpoint(tmp_path / "c.json", Checkpoint(make_model(), 0, 0))
    text = path.read_text()
    path.write_text(text[: len(text) // 2])
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_wrong_format_tag(tmp_path, make_model):
    doc = Checkpoint(make_model(), 0, 0).to_dict()
    doc["format"] = "something-else"
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_inconsistent_shapes(tmp_path, make_model):
    doc = Checkpoint(make_model(), 0, 0).to_dict()
    doc["layers"][0]["w_mean"] = encode_array(np.zeros((3, 3)))
    doc["layers"][0]["w_log_var"] = encode_array(np.zeros((3, 3)))
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_decode_array_validates_length():
    with pytest.raises(CheckpointError):
        decode_array({"shape": [2, 2], "data": [1.0, 2.0]})
    with pytest.raises(CheckpointError):
        decode_array({"data": [1.0]})
    np.testing.assert_array_equal(decode_array(encode_array(np.eye(2))), np.eye(2))
