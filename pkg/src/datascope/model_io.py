"""Binary save/load for fitted topic models.

Layout (all integers little-endian):

    bytes 0-7   : magic "DSCOPETM"
    bytes 8-11  : u32 format version (currently 1)
    bytes 12-19 : u64 JSON header length H
    bytes 20-   : UTF-8 JSON header, then raw array payloads

The JSON header carries the scalar fields plus an `arrays` manifest of
{name, dtype, shape, nbytes}; payloads follow in manifest order as
little-endian C-contiguous bytes.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import BadMagic, TruncatedFile
from .lda import LdaModel
from .lsi import LsiModel

MAGIC = b"DSCOPETM"
FORMAT_VERSION = 1

_LSI_ARRAYS = ("singular_values", "term_factors")
_LDA_ARRAYS = (
    "topic_word_counts",
    "doc_topic_counts",
    "topic_totals",
    "assignments",
    "token_doc",
    "token_word",
)


def _le(array: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(array.astype(array.dtype.newbyteorder("<"), copy=False))


def _write(path: Path, kind: str, scalars: dict, arrays: dict[str, np.ndarray]) -> None:
    manifest = []
    payloads = []
    for name, array in arrays.items():
        le = _le(array)
        manifest.append(
            {
                "name": name,
                "dtype": le.dtype.str,
                "shape": list(le.shape),
                "nbytes": le.nbytes,
            }
        )
        payloads.append(le.tobytes())
    header = json.dumps({"kind": kind, **scalars, "arrays": manifest}).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", FORMAT_VERSION))
        fh.write(struct.pack("<Q", len(header)))
        fh.write(header)
        for blob in payloads:
            fh.write(blob)


def _read(path: Path) -> tuple[dict, dict[str, np.ndarray]]:
    data = Path(path).read_bytes()
    if data[:8] != MAGIC:
        raise BadMagic(f"{path}: not a datascope model file")
    version = struct.unpack("<I", data[8:12])[0]
    if version != FORMAT_VERSION:
        raise BadMagic(f"{path}: unsupported format version {version}")
    header_len = struct.unpack("<Q", data[12:20])[0]
    header = json.loads(data[20 : 20 + header_len].decode("utf-8"))
    offset = 20 + header_len
    arrays: dict[str, np.ndarray] = {}
    for entry in header.pop("arrays"):
        nbytes = entry["nbytes"]
        blob = data[offset : offset + nbytes]
        if len(blob) != nbytes:
            raise TruncatedFile(f"{path}: array {entry['name']} truncated")
        arrays[entry["name"]] = np.frombuffer(blob, dtype=entry["dtype"]).reshape(entry["shape"]).copy()
        offset += nbytes
    return header, arrays


def save_model(model: LsiModel | LdaModel, path: str | Path) -> None:
    path = Path(path)
    if isinstance(model, LsiModel):
        _write(
            path,
            "lsi",
            {
                "k": model.k,
                "seed": model.seed,
                "rank_deficient": model.rank_deficient,
                "vocabulary_terms": model.vocabulary_terms,
            },
            {name: getattr(model, name) for name in _LSI_ARRAYS},
        )
    elif isinstance(model, LdaModel):
        _write(
            path,
            "lda",
            {
                "K": model.K,
                "alpha": model.alpha,
                "beta": model.beta,
                "seed": model.seed,
                "iterations": model.iterations,
                "vocabulary_terms": model.vocabulary_terms,
            },
            {name: getattr(model, name) for name in _LDA_ARRAYS},
        )
    else:
        raise TypeError(f"cannot save {type(model).__name__}")


def load_model(path: str | Path) -> LsiModel | LdaModel:
    header, arrays = _read(Path(path))
    kind = header.pop("kind")
    if kind == "lsi":
        return LsiModel(
            k=header["k"],
            singular_values=arrays["singular_values"],
            term_factors=arrays["term_factors"],
            vocabulary_terms=list(header["vocabulary_terms"]),
            seed=header["seed"],
            rank_deficient=header["rank_deficient"],
        )
    if kind == "lda":
        return LdaModel(
            K=header["K"],
            alpha=header["alpha"],
            beta=header["beta"],
            topic_word_counts=arrays["topic_word_counts"],
            doc_topic_counts=arrays["doc_topic_counts"],
            topic_totals=arrays["topic_totals"],
            assignments=arrays["assignments"],
            token_doc=arrays["token_doc"],
            token_word=arrays["token_word"],
            vocabulary_terms=list(header["vocabulary_terms"]),
            seed=header["seed"],
            iterations=header["iterations"],
        )
    raise BadMagic(f"unknown model kind {kind!r}")
