"""Hypothesis Testing through Visualization: hypothesis records, evidence
binding, verdicts, and report rendering.

A hypothesis starts from its null statement (the opposite of what the
qualitative pass suggested) and can only be closed once it carries both a
quantitative piece of evidence (layout or neighbor report) and a
qualitative one (coding summary or document excerpt) - closing on visuals
alone is exactly the failure mode this workflow exists to prevent.

Reports are pure functions of the persisted record: rendering the same
state twice yields byte-identical markdown.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import Closed, InsufficientEvidence, UnknownSample

QUANTITATIVE_KINDS = ("layout", "neighbor-report")
QUALITATIVE_KINDS = ("coding-summary", "document-excerpt")
EVIDENCE_KINDS = QUANTITATIVE_KINDS + QUALITATIVE_KINDS

AUDIT_FIELDS = (
    "source_given",
    "explicit_choice",
    "content_stated",
    "example_given",
    "suitability_analyzed",
)
AUDIT_VALUES = ("yes", "partial", "no")  # "partial" = given only indirectly


@dataclass
class UsageAudit:
    dataset_id: str
    source_given: str = ""
    explicit_choice: str = ""
    content_stated: str = ""
    example_given: str = ""
    suitability_analyzed: str = ""
    notes: str = ""

    def missing_fields(self) -> list[str]:
        return [name for name in AUDIT_FIELDS if getattr(self, name) not in AUDIT_VALUES]

    def is_complete(self) -> bool:
        return not self.missing_fields()


@dataclass
class Evidence:
    kind: str  # see EVIDENCE_KINDS
    payload: dict
    provenance: dict = field(default_factory=dict)

    def is_quantitative(self) -> bool:
        return self.kind in QUANTITATIVE_KINDS


@dataclass
class Hypothesis:
    hypothesis_id: str
    statement: str
    null_statement: str
    dataset_id: str
    label: str
    supporting_ids: list
    status: str = "open"  # open | null-rejected | null-retained
    evidence: list[Evidence] = field(default_factory=list)
    verdict_rationale: str = ""

    def as_dict(self) -> dict:
        return {
            "hypothesis_id": self.hypothesis_id,
            "statement": self.statement,
            "null_statement": self.null_statement,
            "dataset_id": self.dataset_id,
            "label": self.label,
            "supporting_ids": self.supporting_ids,
            "status": self.status,
            "evidence": [
                {"kind": e.kind, "payload": e.payload, "provenance": e.provenance}
                for e in self.evidence
            ],
            "verdict_rationale": self.verdict_rationale,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Hypothesis":
        return cls(
            hypothesis_id=data["hypothesis_id"],
            statement=data["statement"],
            null_statement=data["null_statement"],
            dataset_id=data["dataset_id"],
            label=data["label"],
            supporting_ids=list(data["supporting_ids"]),
            status=data["status"],
            evidence=[
                Evidence(kind=e["kind"], payload=e["payload"], provenance=e.get("provenance", {}))
                for e in data["evidence"]
            ],
            verdict_rationale=data.get("verdict_rationale", ""),
        )


def register_hypothesis(
    statement: str,
    null_statement: str,
    dataset_id: str,
    label: str,
    supporting_ids: list,
    label_member_ids: list | None = None,
    hypothesis_id: str = "hypothesis",
) -> Hypothesis:
    """Open a hypothesis; the null statement is mandatory up front.

    When label_member_ids is given, every supporting id must belong to the
    target label (UnknownSample otherwise).
    """
    if not null_statement:
        raise ValueError("the null statement must be recorded before any evidence")
    if label_member_ids is not None:
        members = set(label_member_ids)
        for sample_id in supporting_ids:
            if sample_id not in members:
                raise UnknownSample(
                    f"supporting sample {sample_id!r} does not carry label {label!r}"
                )
    return Hypothesis(
        hypothesis_id=hypothesis_id,
        statement=statement,
        null_statement=null_statement,
        dataset_id=dataset_id,
        label=label,
        supporting_ids=list(supporting_ids),
    )


def attach_evidence(hypothesis: Hypothesis, evidence: Evidence) -> Hypothesis:
    if hypothesis.status != "open":
        raise Closed(f"hypothesis is already {hypothesis.status}")
    if evidence.kind not in EVIDENCE_KINDS:
        raise ValueError(f"unknown evidence kind {evidence.kind!r}")
    hypothesis.evidence.append(evidence)
    return hypothesis


def record_verdict(hypothesis: Hypothesis, verdict: str, rationale: str) -> Hypothesis:
    """Close the hypothesis; requires quantitative AND qualitative evidence."""
    if hypothesis.status != "open":
        raise Closed(f"hypothesis is already {hypothesis.status}")
    if verdict not in ("null-rejected", "null-retained"):
        raise ValueError(f"verdict must be null-rejected or null-retained, got {verdict!r}")
    has_quantitative = any(e.is_quantitative() for e in hypothesis.evidence)
    has_qualitative = any(not e.is_quantitative() for e in hypothesis.evidence)
    if not (has_quantitative and has_qualitative):
        raise InsufficientEvidence(
            "a verdict needs at least one layout/neighbor evidence item and "
            "one coding/excerpt evidence item "
            f"(have quantitative={has_quantitative}, qualitative={has_qualitative})"
        )
    hypothesis.status = verdict
    hypothesis.verdict_rationale = rationale
    return hypothesis


_AUDIT_LABELS = {
    "source_given": "Source given?",
    "explicit_choice": "Explicit version choice?",
    "content_stated": "Content stated?",
    "example_given": "Example given?",
    "suitability_analyzed": "Suitability analyzed?",
}


def _render_evidence(item: Evidence, index: int) -> list[str]:
    lines = [f"### Evidence {index}: {item.kind}"]
    if item.kind == "layout" and "svg" in item.payload:
        lines.append("")
        lines.append(item.payload["svg"])
    payload_rows = {k: v for k, v in item.payload.items() if k != "svg"}
    if payload_rows:
        lines.append("")
        lines.append("| field | value |")
        lines.append("| --- | --- |")
        for key in sorted(payload_rows):
            lines.append(f"| {key} | {json.dumps(payload_rows[key], sort_keys=True)} |")
    if item.provenance:
        lines.append("")
        lines.append(f"Provenance: `{json.dumps(item.provenance, sort_keys=True)}`")
    lines.append("")
    return lines


def render_report(hypothesis: Hypothesis, audit: UsageAudit) -> str:
    """Self-contained markdown report: statement, evidence chain with
    provenance, verdict, and the five-field usage-audit table."""
    complete = hypothesis.status != "open" and audit.is_complete()
    lines = [
        f"# Hypothesis report: {hypothesis.hypothesis_id}",
        "",
        f"Status: **{hypothesis.status}**"
        + ("" if complete else "  _(report incomplete)_"),
        "",
        f"- Dataset: `{hypothesis.dataset_id}`",
        f"- Target label: `{hypothesis.label}`",
        f"- Statement: {hypothesis.statement}",
        f"- Null statement: {hypothesis.null_statement}",
        f"- Supporting samples: {', '.join(str(s) for s in hypothesis.supporting_ids)}",
        "",
        "## Evidence chain",
        "",
    ]
    if hypothesis.evidence:
        for i, item in enumerate(hypothesis.evidence, start=1):
            lines.extend(_render_evidence(item, i))
    else:
        lines.append("(no evidence attached)")
        lines.append("")
    lines += [
        "## Verdict",
        "",
        f"{hypothesis.status}: {hypothesis.verdict_rationale}"
        if hypothesis.status != "open"
        else "(still open)",
        "",
        "## Dataset usage audit",
        "",
        "| category | value |",
        "| --- | --- |",
    ]
    for name in AUDIT_FIELDS:
        value = getattr(audit, name) or "(missing)"
        lines.append(f"| {_AUDIT_LABELS[name]} | {value} |")
    lines.append(f"| Notes | {audit.notes or ''} |")
    lines.append("")
    if not audit.is_complete():
        lines.append(f"Incomplete audit: missing {', '.join(audit.missing_fields())}.")
        lines.append("")
    return "\n".join(lines)


def report_json(hypothesis: Hypothesis, audit: UsageAudit) -> dict:
    """Machine-readable twin of the markdown report."""
    return {
        "hypothesis": hypothesis.as_dict(),
        "audit": {
            "dataset_id": audit.dataset_id,
            **{name: getattr(audit, name) for name in AUDIT_FIELDS},
            "notes": audit.notes,
        },
        "complete": hypothesis.status != "open" and audit.is_complete(),
    }


# --- persistence ---------------------------------------------------------


def save_hypothesis(hypothesis: Hypothesis, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(hypothesis.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def load_hypothesis(path: str | Path) -> Hypothesis:
    return Hypothesis.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
