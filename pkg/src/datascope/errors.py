"""Shared exception types.

Every error raised by the library is a subclass of DatascopeError so that
the CLI and HTTP layers can map them to exit codes / status codes in one
place.  The `code` attribute is the stable machine-readable identifier used
in API error bodies.
"""

from __future__ import annotations


class DatascopeError(Exception):
    code = "error"


# --- ingestion ---------------------------------------------------------

class MissingHeaderSeparator(DatascopeError):
    code = "missing_header_separator"


class VersionMismatch(DatascopeError):
    code = "version_mismatch"


class UnknownLabel(DatascopeError):
    code = "unknown_label"


class BadMagic(DatascopeError):
    code = "bad_magic"


class DimensionMismatch(DatascopeError):
    code = "dimension_mismatch"


class CountMismatch(DatascopeError):
    code = "count_mismatch"


class TruncatedFile(DatascopeError):
    code = "truncated_file"


# --- vectorize / models ------------------------------------------------

class EmptyVocabulary(DatascopeError):
    code = "empty_vocabulary"


class VocabularyMismatch(DatascopeError):
    code = "vocabulary_mismatch"


class WeightingMismatch(DatascopeError):
    code = "weighting_mismatch"


class RankDeficient(DatascopeError):
    # reported, not fatal: raised only when the caller asks for strictness
    code = "rank_deficient"


# --- dimensionality reduction ------------------------------------------

class PerplexityOutOfRange(DatascopeError):
    code = "perplexity_out_of_range"


class NonFiniteLoss(DatascopeError):
    code = "non_finite_loss"

    def __init__(self, message: str, iteration: int | None = None):
        super().__init__(message)
        self.iteration = iteration


# --- neighborhood ------------------------------------------------------

class NoNeighbor(DatascopeError):
    code = "no_neighbor"


# --- coding sessions ----------------------------------------------------

class UnknownCode(DatascopeError):
    code = "unknown_code"


class NotYetSampled(DatascopeError):
    code = "not_yet_sampled"


class UnknownSample(DatascopeError):
    code = "unknown_sample"


# --- hypothesis workbench ------------------------------------------------

class Closed(DatascopeError):
    code = "closed"


class InsufficientEvidence(DatascopeError):
    code = "insufficient_evidence"


# --- stores / api --------------------------------------------------------

class NotFound(DatascopeError):
    code = "not_found"


class OrdinalConflict(DatascopeError):
    code = "ordinal_conflict"
