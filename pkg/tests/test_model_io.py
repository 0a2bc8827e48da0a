from __future__ import annotations

import numpy as np
import pytest

from datascope.errors import BadMagic
from datascope.lda import lda_fit
from datascope.lsi import lsi_fit
from datascope.model_io import MAGIC, load_model, save_model

from conftest import space_from_matrix


def test_lsi_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    space = space_from_matrix(rng.normal(size=(8, 6)))
    model = lsi_fit(space, k=3, seed=5)
    path = tmp_path / "model.lsi"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.k == 3
    assert loaded.seed == 5
    assert np.array_equal(loaded.singular_values, model.singular_values)
    assert np.array_equal(loaded.term_factors, model.term_factors)
    assert loaded.vocabulary_terms == model.vocabulary_terms


def test_lda_round_trip(tmp_path):
    counts = np.random.default_rng(1).integers(0, 4, size=(6, 9))
    space = space_from_matrix(counts.astype(np.int64))
    model = lda_fit(space, K=3, iterations=5, seed=2)
    path = tmp_path / "model.lda"
    save_model(model, path)
    loaded = load_model(path)
    assert loaded.K == 3
    assert loaded.alpha == model.alpha
    assert np.array_equal(loaded.topic_word_counts, model.topic_word_counts)
    assert np.array_equal(loaded.doc_topic_counts, model.doc_topic_counts)
    assert np.array_equal(loaded.assignments, model.assignments)
    assert loaded.iterations == 5


def test_magic_is_eight_bytes_and_checked(tmp_path):
    assert len(MAGIC) == 8
    path = tmp_path / "junk.bin"
    path.write_bytes(b"NOTMAGIC" + bytes(64))
    with pytest.raises(BadMagic):
        load_model(path)


def test_truncated_payload_detected(tmp_path):
    rng = np.random.default_rng(3)
    space = space_from_matrix(rng.normal(size=(5, 4)))
    model = lsi_fit(space, k=2)
    path = tmp_path / "model.lsi"
    save_model(model, path)
    data = path.read_bytes()
    path.write_bytes(data[:-16])
    from datascope.errors import TruncatedFile

    with pytest.raises(TruncatedFile):
        load_model(path)
