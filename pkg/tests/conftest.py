from __future__ import annotations

import struct
from pathlib import Path

import numpy as np
import pytest

from datascope.mnist import IMAGE_MAGIC, LABEL_MAGIC
from datascope.newsgroups import Corpus, parse_document


def make_message(
    from_line: str | None = "someone@example.org",
    subject: str = "test",
    body_lines: list[str] | None = None,
    extra_headers: list[tuple[str, str]] | None = None,
) -> bytes:
    lines = []
    if from_line is not None:
        lines.append(f"From: {from_line}")
    lines.append(f"Subject: {subject}")
    for name, value in extra_headers or []:
        lines.append(f"{name}: {value}")
    lines.append("")
    lines.extend(body_lines if body_lines is not None else ["hello world"])
    return ("\n".join(lines) + "\n").encode("latin-1")


def make_corpus(docs: list[tuple[int, str, bytes]], version: str = "original") -> Corpus:
    """Corpus directly from (id, label, raw bytes) triples, bypassing the
    per-version size check (unit-test scale)."""
    documents = [parse_document(raw, doc_id, label) for doc_id, label, raw in docs]
    documents.sort(key=lambda d: (d.label, d.id))
    return Corpus(version=version, documents=documents)


def write_corpus_tree(root: Path, docs: list[tuple[int, str, bytes]]) -> Path:
    for doc_id, label, raw in docs:
        directory = root / label
        directory.mkdir(parents=True, exist_ok=True)
        (directory / str(doc_id)).write_bytes(raw)
    return root


def idx_image_bytes(images: np.ndarray) -> bytes:
    n = images.shape[0]
    return struct.pack(">iiii", IMAGE_MAGIC, n, 28, 28) + images.astype(np.uint8).tobytes()


def idx_label_bytes(labels: np.ndarray) -> bytes:
    return struct.pack(">ii", LABEL_MAGIC, len(labels)) + labels.astype(np.uint8).tobytes()


@pytest.fixture
def two_image_fixture() -> tuple[bytes, bytes, np.ndarray, np.ndarray]:
    rng = np.random.default_rng(7)
    images = rng.integers(0, 256, size=(2, 28, 28)).astype(np.uint8)
    labels = np.array([3, 3], dtype=np.uint8)
    return idx_image_bytes(images), idx_label_bytes(labels), images, labels


def space_from_matrix(matrix: np.ndarray, weighting: str = "counts"):
    """VectorSpace wrapper around a raw matrix, for numeric tests."""
    import scipy.sparse as sp

    from datascope.vectorize import VectorSpace, Vocabulary

    matrix = np.asarray(matrix)
    n, v = matrix.shape
    terms = [f"t{i:04d}" for i in range(v)]
    df = (matrix > 0).sum(axis=0).astype(np.int64)
    return VectorSpace(
        vocabulary=Vocabulary(terms=terms, document_frequency=df),
        matrix=sp.csr_matrix(matrix),
        weighting=weighting,
        row_norm="none",
        doc_ids=list(range(n)),
        labels=["?"] * n,
    )
