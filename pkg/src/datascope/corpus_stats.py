"""Descriptive corpus statistics: author concentration, post and line
shares, and quote ratios.

"Lines" means body lines by default (quotes occur in bodies, and the 18828
variant strips most headers); pass line_rule="body+headers" to include
header lines in every line count for reconciliation runs.

Shares are exact rationals (fractions.Fraction); rounding is left to
display code.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .newsgroups import Corpus, RawDocument, author_of

LINE_RULES = ("body", "body+headers")


@dataclass
class ContributionSummary:
    threshold: int
    author_count: int
    author_share: Fraction
    post_count: int
    post_share: Fraction
    line_count: int
    line_share: Fraction


@dataclass
class QuoteStats:
    total_lines: int
    quote_lines: int

    @property
    def ratio(self) -> Fraction:
        if self.total_lines == 0:
            return Fraction(0)
        return Fraction(self.quote_lines, self.total_lines)


def _doc_line_count(doc: RawDocument, line_rule: str) -> int:
    if line_rule == "body":
        return len(doc.body_lines)
    if line_rule == "body+headers":
        return len(doc.body_lines) + len(doc.raw_header_lines)
    raise ValueError(f"line_rule must be one of {LINE_RULES}, got {line_rule!r}")


def author_index(corpus: Corpus) -> dict[str, list[int]]:
    """Map author key -> document ids, in corpus order.

    Keys are author_of values; every document appears under exactly one key.
    """
    index: dict[str, list[int]] = {}
    for doc in corpus.documents:
        index.setdefault(author_of(doc), []).append(doc.id)
    return index


def contribution_summary(
    corpus: Corpus,
    thresholds: list[int],
    line_rule: str = "body",
) -> list[ContributionSummary]:
    """One summary per threshold: authors with at least that many posts,
    and the share of authors / posts / lines they account for."""
    if any(t < 1 for t in thresholds):
        raise ValueError("thresholds must be >= 1")
    if sorted(thresholds) != list(thresholds):
        raise ValueError("thresholds must be ascending")

    posts_by_author: dict[str, int] = {}
    lines_by_author: dict[str, int] = {}
    total_lines = 0
    for doc in corpus.documents:
        key = author_of(doc)
        n_lines = _doc_line_count(doc, line_rule)
        posts_by_author[key] = posts_by_author.get(key, 0) + 1
        lines_by_author[key] = lines_by_author.get(key, 0) + n_lines
        total_lines += n_lines

    total_posts = len(corpus.documents)
    total_authors = len(posts_by_author)

    summaries = []
    for threshold in thresholds:
        qualifying = [a for a, n in posts_by_author.items() if n >= threshold]
        post_count = sum(posts_by_author[a] for a in qualifying)
        line_count = sum(lines_by_author[a] for a in qualifying)
        summaries.append(
            ContributionSummary(
                threshold=threshold,
                author_count=len(qualifying),
                author_share=Fraction(len(qualifying), total_authors) if total_authors else Fraction(0),
                post_count=post_count,
                post_share=Fraction(post_count, total_posts) if total_posts else Fraction(0),
                line_count=line_count,
                line_share=Fraction(line_count, total_lines) if total_lines else Fraction(0),
            )
        )
    return summaries


def quote_stats(corpus: Corpus) -> QuoteStats:
    """Counts over body lines using the per-line quote flags."""
    total = 0
    quoted = 0
    for doc in corpus.documents:
        total += len(doc.body_lines)
        quoted += sum(doc.quote_flags)
    return QuoteStats(total_lines=total, quote_lines=quoted)


def total_lines(corpus: Corpus, line_rule: str = "body") -> int:
    return sum(_doc_line_count(doc, line_rule) for doc in corpus.documents)


def stats_report(
    corpus: Corpus,
    thresholds: list[int] | None = None,
    line_rule: str = "body",
) -> dict:
    """JSON-ready report mirroring the descriptive-statistics narrative:
    document count, unique authors, contribution summaries, quote ratio."""
    thresholds = thresholds or [2, 3, 10]
    authors = author_index(corpus)
    summaries = contribution_summary(corpus, thresholds, line_rule=line_rule)
    quotes = quote_stats(corpus)
    return {
        "version": corpus.version,
        "line_rule": line_rule,
        "documents": len(corpus.documents),
        "labels": len(corpus.label_set),
        "unique_authors": len(authors),
        "total_lines": total_lines(corpus, line_rule),
        "contributions": [
            {
                "threshold": s.threshold,
                "authors": s.author_count,
                "author_share": float(s.author_share),
                "posts": s.post_count,
                "post_share": float(s.post_share),
                "lines": s.line_count,
                "line_share": float(s.line_share),
            }
            for s in summaries
        ],
        "quote": {
            "total_lines": quotes.total_lines,
            "quote_lines": quotes.quote_lines,
            "ratio": float(quotes.ratio),
        },
    }


def format_report(report: dict) -> str:
    """Plain-text table for terminals, same ordering as the JSON report."""
    lines = [
        f"dataset version : {report['version']}",
        f"line rule       : {report['line_rule']}",
        f"documents       : {report['documents']}",
        f"unique authors  : {report['unique_authors']}",
        f"total lines     : {report['total_lines']}",
        "",
        f"{'threshold':>9}  {'authors':>8}  {'a-share':>8}  {'posts':>7}  {'p-share':>8}  {'lines':>8}  {'l-share':>8}",
    ]
    for row in report["contributions"]:
        lines.append(
            f"{row['threshold']:>9}  {row['authors']:>8}  {row['author_share']:>8.2f}  "
            f"{row['posts']:>7}  {row['post_share']:>8.2f}  {row['lines']:>8}  {row['line_share']:>8.2f}"
        )
    quote = report["quote"]
    lines += [
        "",
        f"quote lines     : {quote['quote_lines']} of {quote['total_lines']} "
        f"({100 * quote['ratio']:.2f}%)",
    ]
    return "\n".join(lines)
