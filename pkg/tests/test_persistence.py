import json

import numpy as np
import pytest

from junolog.errors import CorruptModel, UnsupportedVersion
from junolog.evaluation import split_train_test
from junolog.ocsvm import decision_function
from junolog.persistence import (
    config_hash,
    dumps_model,
    load_model,
    loads_model,
    model_to_dict,
    save_model,
)
from junolog.pipeline import DetectorConfig, fit_detector


@pytest.fixture(scope="module")
def model(synth_corpus):
    tr, _ = split_train_test(synth_corpus)
    m = fit_detector(tr)
    m.provenance = {"seed": 42, "config_hash": "x", "created": "2018-06-30T08:00:00"}
    return m


def _same(a, b):
    assert a.kernel == b.kernel and a.rho == b.rho and a.nu == b.nu
    assert a.training_size == b.training_size
    assert np.array_equal(a.support_vectors, b.support_vectors)
    assert np.array_equal(a.alphas, b.alphas)
    assert a.scaler == b.scaler and a.dictionary == b.dictionary
    assert dict(a.idf.df) == dict(b.idf.df) and a.idf.N == b.idf.N
    assert a.provenance == b.provenance


def test_roundtrip(tmp_path, model):
    path = tmp_path / "m.json"
    save_model(model, path)
    _same(model, load_model(path))


def test_format_version_first(model):
    assert dumps_model(model).lstrip("{\n ").startswith('"format_version": 1')


def test_save_is_byte_stable(tmp_path, model):
    save_model(model, tmp_path / "a")
    save_model(model, tmp_path / "b")
    assert (tmp_path / "a").read_bytes() == (tmp_path / "b").read_bytes()


def test_decision_values_bit_exact(tmp_path, model):
    save_model(model, tmp_path / "m.json")
    back = load_model(tmp_path / "m.json")
    Z = np.random.default_rng(0).normal(size=(100, 3)) * 3
    assert np.array_equal(decision_function(model, Z), decision_function(back, Z))


def test_unwritable_path(tmp_path, model):
    with pytest.raises(OSError):
        save_model(model, tmp_path / "missing-dir" / "m.json")


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_model(tmp_path / "nope.json")


def _mutated(model, **changes):
    doc = model_to_dict(model)
    doc.update(changes)
    return json.dumps(doc)


def test_unsupported_version(model):
    with pytest.raises(UnsupportedVersion):
        loads_model(_mutated(model, format_version=99))


def test_alpha_sum_checked(model):
    half = (np.asarray(model.alphas) * 0.5).tolist()
    with pytest.raises(CorruptModel):
        loads_model(_mutated(model, alphas=half))


def test_alpha_bound_checked(model):
    a = np.zeros(len(model.alphas))
    a[0] = 1.0
    with pytest.raises(CorruptModel):
        loads_model(_mutated(model, alphas=a.tolist()))


def test_shape_and_garbage_checked(model):
    with pytest.raises(CorruptModel):
        loads_model(_mutated(model, support_vectors=[[0.0, 1.0]]))
    with pytest.raises(CorruptModel):
        loads_model("{not json")
    with pytest.raises(CorruptModel):
        loads_model("[]")
    doc = model_to_dict(model)
    del doc["rho"]
    with pytest.raises(CorruptModel):
        loads_model(json.dumps(doc))


def test_config_hash_canonical():
    assert config_hash({"a": 1, "b": 2.5}) == config_hash({"b": 2.5, "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_retrain_gives_identical_bytes(synth_corpus):
    tr, _ = split_train_test(synth_corpus, seed=7)
    a = fit_detector(tr, DetectorConfig(kernel="sigmoid"))
    b = fit_detector(tr, DetectorConfig(kernel="sigmoid"))
    assert dumps_model(a) == dumps_model(b)
