"""MNIST IDX ingestion.

Reads the big-endian IDX binaries of the canonical distribution:

    offset 0   : u32 magic (2051 for images, 2049 for labels)
    offset 4   : one u32 per dimension
    then       : row-major unsigned bytes

Gzip-compressed inputs are accepted transparently.  Pixels are kept as raw
0-255 intensities; scaling happens in vectorize, not here.
"""

from __future__ import annotations

import gzip
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import BadMagic, CountMismatch, DimensionMismatch, TruncatedFile

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049
IMAGE_SIDE = 28


@dataclass
class Sample:
    index: int
    pixels: np.ndarray  # 28x28 uint8
    label: int


@dataclass
class ImageSet:
    split: str  # train | test
    images: np.ndarray  # N x 28 x 28 uint8
    labels: np.ndarray  # N uint8

    def __len__(self) -> int:
        return len(self.labels)

    def sample(self, index: int) -> Sample:
        return Sample(index=index, pixels=self.images[index], label=int(self.labels[index]))


def _maybe_gunzip(data: bytes) -> bytes:
    if data[:2] == b"\x1f\x8b":
        return gzip.decompress(data)
    return data


def _read_header(data: bytes, expected_magic: int, n_dims: int) -> tuple[int, ...]:
    header_len = 4 + 4 * n_dims
    if len(data) < header_len:
        raise TruncatedFile(f"file too short for IDX header ({len(data)} bytes)")
    magic = struct.unpack(">i", data[:4])[0]
    if magic != expected_magic:
        raise BadMagic(f"expected magic {expected_magic}, got {magic}")
    return struct.unpack(f">{n_dims}i", data[4:header_len])


def parse_idx(images_bytes: bytes, labels_bytes: bytes, split: str = "train") -> ImageSet:
    """Pair image i with label i; dimensions must be 28x28."""
    images_bytes = _maybe_gunzip(images_bytes)
    labels_bytes = _maybe_gunzip(labels_bytes)

    n_images, rows, cols = _read_header(images_bytes, IMAGE_MAGIC, 3)
    (n_labels,) = _read_header(labels_bytes, LABEL_MAGIC, 1)

    if (rows, cols) != (IMAGE_SIDE, IMAGE_SIDE):
        raise DimensionMismatch(f"expected 28x28 images, header says {rows}x{cols}")
    if n_images != n_labels:
        raise CountMismatch(f"{n_images} images vs {n_labels} labels")

    pixel_bytes = images_bytes[16:]
    if len(pixel_bytes) < n_images * rows * cols:
        raise TruncatedFile(
            f"image payload holds {len(pixel_bytes)} bytes, need {n_images * rows * cols}"
        )
    label_bytes = labels_bytes[8:]
    if len(label_bytes) < n_labels:
        raise TruncatedFile(f"label payload holds {len(label_bytes)} bytes, need {n_labels}")

    images = np.frombuffer(pixel_bytes, dtype=np.uint8, count=n_images * rows * cols)
    images = images.reshape(n_images, rows, cols).copy()
    labels = np.frombuffer(label_bytes, dtype=np.uint8, count=n_labels).copy()
    return ImageSet(split=split, images=images, labels=labels)


def load_idx_files(images_path: str | Path, labels_path: str | Path, split: str = "train") -> ImageSet:
    return parse_idx(Path(images_path).read_bytes(), Path(labels_path).read_bytes(), split=split)


def serialize_idx(image_set: ImageSet) -> tuple[bytes, bytes]:
    """Re-serialize to IDX bytes; parse(serialize(s)) == s."""
    n = len(image_set)
    images = struct.pack(">iiii", IMAGE_MAGIC, n, IMAGE_SIDE, IMAGE_SIDE) + image_set.images.tobytes()
    labels = struct.pack(">ii", LABEL_MAGIC, n) + image_set.labels.tobytes()
    return images, labels


def samples_with_label(image_set: ImageSet, label: int) -> list[int]:
    """Ascending sample indices carrying the label.

    This ascending file order is the "lexicographic" order used to build
    coding queues.
    """
    if not 0 <= label <= 9:
        raise ValueError(f"label must be a digit 0-9, got {label}")
    return [int(i) for i in np.nonzero(image_set.labels == label)[0]]


def label_counts(image_set: ImageSet) -> dict[int, int]:
    values, counts = np.unique(image_set.labels, return_counts=True)
    return {int(v): int(c) for v, c in zip(values, counts)}
