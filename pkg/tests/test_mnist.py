from __future__ import annotations

import gzip
import struct

import numpy as np
import pytest

from datascope.errors import BadMagic, CountMismatch, DimensionMismatch, TruncatedFile
from datascope.mnist import (
    label_counts,
    parse_idx,
    samples_with_label,
    serialize_idx,
)

from conftest import idx_image_bytes, idx_label_bytes


def test_parse_two_image_fixture(two_image_fixture):
    images_bytes, labels_bytes, images, labels = two_image_fixture
    image_set = parse_idx(images_bytes, labels_bytes)
    assert len(image_set) == 2
    assert image_set.images.shape == (2, 28, 28)
    assert np.array_equal(image_set.images, images)
    assert np.array_equal(image_set.labels, labels)


def test_sample_pairs_image_with_label(two_image_fixture):
    images_bytes, labels_bytes, images, labels = two_image_fixture
    image_set = parse_idx(images_bytes, labels_bytes)
    sample = image_set.sample(1)
    assert sample.index == 1
    assert sample.label == int(labels[1])
    assert np.array_equal(sample.pixels, images[1])


def test_wrong_magic_on_labels_file(two_image_fixture):
    images_bytes, _, _, labels = two_image_fixture
    bad_labels = struct.pack(">ii", 2051, len(labels)) + labels.tobytes()
    with pytest.raises(BadMagic):
        parse_idx(images_bytes, bad_labels)


def test_dimension_mismatch():
    images = struct.pack(">iiii", 2051, 1, 14, 14) + bytes(14 * 14)
    labels = idx_label_bytes(np.array([0], dtype=np.uint8))
    with pytest.raises(DimensionMismatch):
        parse_idx(images, labels)


def test_count_mismatch(two_image_fixture):
    images_bytes, _, _, _ = two_image_fixture
    labels = idx_label_bytes(np.array([1], dtype=np.uint8))
    with pytest.raises(CountMismatch):
        parse_idx(images_bytes, labels)


def test_truncated_image_payload():
    images = struct.pack(">iiii", 2051, 2, 28, 28) + bytes(784)  # one image short
    labels = idx_label_bytes(np.array([0, 1], dtype=np.uint8))
    with pytest.raises(TruncatedFile):
        parse_idx(images, labels)


def test_gzip_inputs_transparent(two_image_fixture):
    images_bytes, labels_bytes, images, labels = two_image_fixture
    image_set = parse_idx(gzip.compress(images_bytes), gzip.compress(labels_bytes))
    assert np.array_equal(image_set.images, images)
    assert np.array_equal(image_set.labels, labels)


def test_serialize_round_trip(two_image_fixture):
    images_bytes, labels_bytes, _, _ = two_image_fixture
    image_set = parse_idx(images_bytes, labels_bytes)
    re_images, re_labels = serialize_idx(image_set)
    assert re_images == images_bytes
    assert re_labels == labels_bytes
    again = parse_idx(re_images, re_labels)
    assert np.array_equal(again.images, image_set.images)
    assert np.array_equal(again.labels, image_set.labels)


def test_samples_with_label_fixture(two_image_fixture):
    images_bytes, labels_bytes, _, _ = two_image_fixture
    image_set = parse_idx(images_bytes, labels_bytes)
    assert samples_with_label(image_set, 3) == [0, 1]
    assert samples_with_label(image_set, 7) == []


def test_samples_with_label_ascending_order():
    rng = np.random.default_rng(0)
    labels = rng.integers(0, 10, size=200).astype(np.uint8)
    images = rng.integers(0, 256, size=(200, 28, 28)).astype(np.uint8)
    image_set = parse_idx(idx_image_bytes(images), idx_label_bytes(labels))
    for digit in range(10):
        indices = samples_with_label(image_set, digit)
        assert indices == sorted(indices)
        assert all(labels[i] == digit for i in indices)


def test_label_counts_sum_to_total():
    rng = np.random.default_rng(1)
    labels = rng.integers(0, 10, size=500).astype(np.uint8)
    images = np.zeros((500, 28, 28), dtype=np.uint8)
    image_set = parse_idx(idx_image_bytes(images), idx_label_bytes(labels))
    counts = label_counts(image_set)
    assert sum(counts.values()) == 500
