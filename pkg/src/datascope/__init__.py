"""datascope: a workbench for interrogating ML datasets.

Descriptive corpus statistics, topic models (LSI, LDA), t-SNE layouts,
same-label neighborhood analysis, grounded-theory coding sessions, and
evidence-gated hypothesis reports, exercised on the 20 Newsgroups and
MNIST datasets.
"""

from . import errors
from .coding import (
    CodingSession,
    DatasetView,
    assign_code,
    code_summary,
    create_code,
    create_session,
    import_coding_csv,
    load_session,
    next_sample,
    saturation_state,
    write_session,
)
from .corpus_stats import author_index, contribution_summary, quote_stats, stats_report
from .dr_metrics import trustworthiness
from .layout import EmbeddingLayout
from .lda import LdaModel, lda_embed, lda_fit
from .lsi import LsiModel, lsi_embed, lsi_fit
from .mnist import ImageSet, load_idx_files, parse_idx, samples_with_label
from .model_io import load_model, save_model
from .neighborhood import farthest_in_label, nearest_in_label, neighbor_report
from .newsgroups import Corpus, RawDocument, author_of, load_corpus, parse_document
from .tsne import AffinityMatrix, TsneConfig, compute_affinities, tsne
from .vectorize import (
    VectorizeConfig,
    VectorSpace,
    build_vector_space,
    flatten_images,
    tokenize,
)
from .workbench import (
    Evidence,
    Hypothesis,
    UsageAudit,
    attach_evidence,
    record_verdict,
    register_hypothesis,
    render_report,
)

__version__ = "0.1.0"

__all__ = [
    "errors",
    "AffinityMatrix",
    "CodingSession",
    "Corpus",
    "DatasetView",
    "EmbeddingLayout",
    "Evidence",
    "Hypothesis",
    "ImageSet",
    "LdaModel",
    "LsiModel",
    "RawDocument",
    "TsneConfig",
    "UsageAudit",
    "VectorSpace",
    "VectorizeConfig",
    "assign_code",
    "attach_evidence",
    "author_index",
    "author_of",
    "build_vector_space",
    "code_summary",
    "compute_affinities",
    "contribution_summary",
    "create_code",
    "create_session",
    "farthest_in_label",
    "flatten_images",
    "import_coding_csv",
    "lda_embed",
    "lda_fit",
    "load_corpus",
    "load_idx_files",
    "load_model",
    "load_session",
    "lsi_embed",
    "lsi_fit",
    "nearest_in_label",
    "neighbor_report",
    "next_sample",
    "parse_document",
    "parse_idx",
    "quote_stats",
    "record_verdict",
    "register_hypothesis",
    "render_report",
    "samples_with_label",
    "saturation_state",
    "save_model",
    "stats_report",
    "tokenize",
    "trustworthiness",
    "tsne",
    "write_session",
]
