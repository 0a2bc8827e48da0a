"""Latent Dirichlet allocation inferred by collapsed Gibbs sampling.

Per token the sampler draws from

    p(z = k) ~ (n_dk + alpha) * (n_kw + beta) / (n_k + V*beta)

where the counts exclude the token being resampled.  All randomness comes
from one seeded generator: topic initialization plus one uniform per token
per sweep, so a fixed seed fixes the full output.

The sweep kernel is plain Python over numpy arrays; when numba is
installed the same function is JIT-compiled, which is what makes
corpus-scale runs (millions of token-sweeps) practical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import WeightingMismatch
from .vectorize import VectorSpace


def _gibbs_sweep(token_doc, token_word, z, doc_topic, topic_word, topic_totals,
                 alpha, beta, uniforms, probs):
    n_topics = topic_word.shape[0]
    v_size = topic_word.shape[1]
    for i in range(token_doc.shape[0]):
        d = token_doc[i]
        w = token_word[i]
        k = z[i]
        doc_topic[d, k] -= 1
        topic_word[k, w] -= 1
        topic_totals[k] -= 1

        total = 0.0
        for t in range(n_topics):
            p = (doc_topic[d, t] + alpha) * (topic_word[t, w] + beta) \
                / (topic_totals[t] + v_size * beta)
            probs[t] = p
            total += p

        u = uniforms[i] * total
        acc = 0.0
        new_k = n_topics - 1
        for t in range(n_topics):
            acc += probs[t]
            if u < acc:
                new_k = t
                break

        z[i] = new_k
        doc_topic[d, new_k] += 1
        topic_word[new_k, w] += 1
        topic_totals[new_k] += 1


try:  # pragma: no cover - environment dependent
    import numba

    _gibbs_sweep_fast = numba.njit(cache=False)(_gibbs_sweep)
except ImportError:  # pragma: no cover
    _gibbs_sweep_fast = None


@dataclass
class LdaModel:
    K: int
    alpha: float
    beta: float
    topic_word_counts: np.ndarray  # K x V int64
    doc_topic_counts: np.ndarray  # N x K int64
    topic_totals: np.ndarray  # K int64
    assignments: np.ndarray  # per-token topic, int32
    token_doc: np.ndarray  # per-token document row, int32
    token_word: np.ndarray  # per-token vocabulary column, int32
    vocabulary_terms: list[str]
    seed: int
    iterations: int

    def topic_word_distributions(self) -> np.ndarray:
        """K x V rows of p(w | k) with the beta smoothing applied."""
        weights = self.topic_word_counts + self.beta
        return weights / weights.sum(axis=1, keepdims=True)


def _expand_tokens(matrix: sp.csr_matrix) -> tuple[np.ndarray, np.ndarray]:
    """Token streams from a counts matrix, in (row, column) order."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    rows = np.repeat(coo.row[order], coo.data[order].astype(np.int64))
    cols = np.repeat(coo.col[order], coo.data[order].astype(np.int64))
    return rows.astype(np.int32), cols.astype(np.int32)


def _check_counts(space: VectorSpace) -> sp.csr_matrix:
    if space.weighting != "counts":
        raise WeightingMismatch(
            f"Gibbs sampling needs integer counts, space is {space.weighting!r} weighted"
        )
    matrix = space.matrix
    if not np.issubdtype(matrix.dtype, np.integer):
        data = matrix.data
        if not np.allclose(data, np.round(data)):
            raise WeightingMismatch("matrix entries are not integers")
        matrix = sp.csr_matrix(
            (np.round(data).astype(np.int64), matrix.indices, matrix.indptr),
            shape=matrix.shape,
        )
    return matrix


def lda_fit(
    space: VectorSpace,
    K: int = 20,
    alpha: float | None = None,
    beta: float = 0.01,
    iterations: int = 500,
    seed: int = 0,
    engine: str = "auto",
) -> LdaModel:
    """Run `iterations` full Gibbs sweeps over every token.

    alpha defaults to 50/K.  engine: "auto" uses the numba-compiled kernel
    when available, "python" forces the interpreted one (same arithmetic).
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    matrix = _check_counts(space)
    if alpha is None:
        alpha = 50.0 / K

    n_docs, v_size = matrix.shape
    token_doc, token_word = _expand_tokens(matrix)
    n_tokens = len(token_doc)

    rng = np.random.default_rng(seed)
    z = rng.integers(0, K, size=n_tokens).astype(np.int32)

    doc_topic = np.zeros((n_docs, K), dtype=np.int64)
    topic_word = np.zeros((K, v_size), dtype=np.int64)
    topic_totals = np.zeros(K, dtype=np.int64)
    np.add.at(doc_topic, (token_doc, z), 1)
    np.add.at(topic_word, (z, token_word), 1)
    np.add.at(topic_totals, z, 1)

    if engine == "auto" and _gibbs_sweep_fast is not None:
        sweep = _gibbs_sweep_fast
    elif engine in ("auto", "python"):
        sweep = _gibbs_sweep
    elif engine == "numba":
        if _gibbs_sweep_fast is None:
            raise RuntimeError("numba is not installed")
        sweep = _gibbs_sweep_fast
    else:
        raise ValueError(f"unknown engine {engine!r}")

    probs = np.empty(K, dtype=np.float64)
    for _ in range(iterations):
        uniforms = rng.random(n_tokens)
        sweep(token_doc, token_word, z, doc_topic, topic_word, topic_totals,
              float(alpha), float(beta), uniforms, probs)

    return LdaModel(
        K=K,
        alpha=float(alpha),
        beta=float(beta),
        topic_word_counts=topic_word,
        doc_topic_counts=doc_topic,
        topic_totals=topic_totals,
        assignments=z,
        token_doc=token_doc,
        token_word=token_word,
        vocabulary_terms=list(space.vocabulary.terms),
        seed=seed,
        iterations=iterations,
    )


def check_count_invariants(model: LdaModel) -> None:
    """Bookkeeping identities that must hold exactly after every sweep."""
    if (model.topic_word_counts < 0).any() or (model.doc_topic_counts < 0).any():
        raise AssertionError("negative counts")
    if not np.array_equal(model.topic_word_counts.sum(axis=1), model.topic_totals):
        raise AssertionError("topic_word rows do not sum to topic_totals")
    doc_lengths = np.bincount(model.token_doc, minlength=model.doc_topic_counts.shape[0])
    if not np.array_equal(model.doc_topic_counts.sum(axis=1), doc_lengths):
        raise AssertionError("doc_topic rows do not sum to document token counts")
    rebuilt = np.zeros_like(model.doc_topic_counts)
    np.add.at(rebuilt, (model.token_doc, model.assignments), 1)
    if not np.array_equal(rebuilt, model.doc_topic_counts):
        raise AssertionError("assignments do not reproduce doc_topic counts")


def lda_embed(model: LdaModel, space: VectorSpace | None = None) -> np.ndarray:
    """Document-topic proportions: (n_dk + alpha) / (len_d + K*alpha).

    Rows sum to 1; an empty document gets the uniform 1/K row.
    """
    counts = model.doc_topic_counts.astype(np.float64)
    lengths = counts.sum(axis=1, keepdims=True)
    return (counts + model.alpha) / (lengths + model.K * model.alpha)
