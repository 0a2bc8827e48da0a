"""Numeric representations of corpora and image sets.

Text goes through tokenize -> vocabulary -> sparse document-term counts,
optionally TF-IDF weighted with the smoothed formula

    idf(t) = ln((1 + N) / (1 + df(t))) + 1

and L2 row normalization.  Images are flattened to N x 784 rows scaled to
[0, 1].  Matrices are scipy CSR; weighting never changes the sparsity
pattern.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import EmptyVocabulary
from .mnist import ImageSet
from .newsgroups import Corpus
from .stopwords import ENGLISH_STOPWORDS

_SPLIT = re.compile(r"[^0-9a-z]+")
_PURE_NUMBER = re.compile(r"^[0-9]+$")


@dataclass
class TokenizerConfig:
    min_token_length: int = 2
    max_number_length: int = 6
    drop_stopwords: bool = True


@dataclass
class VectorizeConfig:
    min_df: int = 1
    max_df_fraction: float = 1.0
    tokenizer: TokenizerConfig = field(default_factory=TokenizerConfig)
    quote_lines: str = "include"  # include | exclude
    weighting: str = "counts"  # counts | tfidf
    row_norm: str = "none"  # none | L2

    def as_dict(self) -> dict:
        return {
            "min_df": self.min_df,
            "max_df_fraction": self.max_df_fraction,
            "min_token_length": self.tokenizer.min_token_length,
            "max_number_length": self.tokenizer.max_number_length,
            "drop_stopwords": self.tokenizer.drop_stopwords,
            "quote_lines": self.quote_lines,
            "weighting": self.weighting,
            "row_norm": self.row_norm,
        }


#: preset used by the text case-study pipeline; every knob stays overridable
#: because the upstream pipeline's exact preprocessing is unpublished.
CASE_STUDY_TEXT_CONFIG = VectorizeConfig(
    min_df=5,
    max_df_fraction=0.5,
    quote_lines="exclude",
    weighting="tfidf",
    row_norm="L2",
)


@dataclass
class Vocabulary:
    terms: list[str]  # sorted, unique
    document_frequency: np.ndarray  # per-term df, aligned with terms

    def __len__(self) -> int:
        return len(self.terms)

    def index(self) -> dict[str, int]:
        return {t: i for i, t in enumerate(self.terms)}


@dataclass
class VectorSpace:
    vocabulary: Vocabulary
    matrix: sp.csr_matrix  # N x V nonnegative weights
    weighting: str
    row_norm: str
    doc_ids: list[int]
    labels: list[str]

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape


def tokenize(text: str, config: TokenizerConfig | None = None) -> list[str]:
    """Lowercase, split on any non-alphanumeric run, drop short tokens,
    over-long pure numbers, and (optionally) stopwords."""
    config = config or TokenizerConfig()
    tokens = []
    for token in _SPLIT.split(text.lower()):
        if len(token) < config.min_token_length:
            continue
        if _PURE_NUMBER.match(token) and len(token) > config.max_number_length:
            continue
        if config.drop_stopwords and token in ENGLISH_STOPWORDS:
            continue
        tokens.append(token)
    return tokens


def document_tokens(doc, config: VectorizeConfig) -> list[str]:
    """Tokens of one corpus document under the config's quote-line rule."""
    if config.quote_lines == "exclude":
        lines = [line for line, quoted in zip(doc.body_lines, doc.quote_flags) if not quoted]
    else:
        lines = doc.body_lines
    return tokenize("\n".join(lines), config.tokenizer)


def _tfidf_weights(counts: sp.csr_matrix, document_frequency: np.ndarray) -> sp.csr_matrix:
    n_docs = counts.shape[0]
    idf = np.log((1.0 + n_docs) / (1.0 + document_frequency)) + 1.0
    weighted = counts.astype(np.float64).multiply(idf[np.newaxis, :])
    return sp.csr_matrix(weighted)


def _l2_normalize_rows(matrix: sp.csr_matrix) -> sp.csr_matrix:
    matrix = sp.csr_matrix(matrix, dtype=np.float64, copy=True)
    norms = np.sqrt(matrix.multiply(matrix).sum(axis=1)).A.ravel()
    scale = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return sp.csr_matrix(sp.diags(scale) @ matrix)


def build_vector_space(corpus: Corpus, config: VectorizeConfig | None = None) -> VectorSpace:
    """Tokenize a corpus and assemble the weighted document-term matrix.

    Vocabulary is filtered by the df bounds [min_df, max_df_fraction * N];
    raises EmptyVocabulary when nothing survives.
    """
    config = config or VectorizeConfig()
    if config.min_df < 1:
        raise ValueError("min_df must be >= 1")
    if not 0 < config.max_df_fraction <= 1:
        raise ValueError("max_df_fraction must be in (0, 1]")

    docs_tokens = [document_tokens(doc, config) for doc in corpus.documents]
    n_docs = len(docs_tokens)

    df: dict[str, int] = {}
    for tokens in docs_tokens:
        for term in set(tokens):
            df[term] = df.get(term, 0) + 1

    max_df = config.max_df_fraction * n_docs
    terms = sorted(t for t, f in df.items() if config.min_df <= f <= max_df)
    if not terms:
        raise EmptyVocabulary(
            f"df bounds [{config.min_df}, {max_df:.1f}] removed all {len(df)} terms"
        )
    vocabulary = Vocabulary(
        terms=terms,
        document_frequency=np.array([df[t] for t in terms], dtype=np.int64),
    )
    term_index = vocabulary.index()

    rows: list[int] = []
    cols: list[int] = []
    data: list[int] = []
    for row, tokens in enumerate(docs_tokens):
        counts: dict[int, int] = {}
        for token in tokens:
            col = term_index.get(token)
            if col is not None:
                counts[col] = counts.get(col, 0) + 1
        for col, count in sorted(counts.items()):
            rows.append(row)
            cols.append(col)
            data.append(count)
    matrix = sp.csr_matrix(
        (np.array(data, dtype=np.int64), (rows, cols)),
        shape=(n_docs, len(terms)),
    )

    if config.weighting == "tfidf":
        matrix = _tfidf_weights(matrix, vocabulary.document_frequency)
    elif config.weighting != "counts":
        raise ValueError(f"unknown weighting {config.weighting!r}")

    if config.row_norm == "L2":
        matrix = _l2_normalize_rows(matrix)
    elif config.row_norm != "none":
        raise ValueError(f"unknown row_norm {config.row_norm!r}")

    return VectorSpace(
        vocabulary=vocabulary,
        matrix=matrix,
        weighting=config.weighting,
        row_norm=config.row_norm,
        doc_ids=[doc.id for doc in corpus.documents],
        labels=[doc.label for doc in corpus.documents],
    )


def flatten_images(image_set: ImageSet) -> np.ndarray:
    """N x 784 float64 matrix; row i = row-major pixels of sample i / 255."""
    n = len(image_set)
    return image_set.images.reshape(n, -1).astype(np.float64) / 255.0


def export_triplets(matrix: sp.spmatrix, path: str) -> None:
    """Sparse triplet text format: header "N V NNZ", then "row col value"
    lines in row-major order (0-based indices)."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{coo.shape[0]} {coo.shape[1]} {coo.nnz}\n")
        for i in order:
            fh.write(f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17g}\n")


def import_triplets(path: str) -> sp.csr_matrix:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        n, v, nnz = (int(x) for x in header)
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        data = np.empty(nnz, dtype=np.float64)
        for i in range(nnz):
            parts = fh.readline().split()
            rows[i], cols[i], data[i] = int(parts[0]), int(parts[1]), float(parts[2])
    return sp.csr_matrix((data, (rows, cols)), shape=(n, v))
