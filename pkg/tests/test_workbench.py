from __future__ import annotations

import pytest

from datascope.errors import Closed, InsufficientEvidence, UnknownSample
from datascope.workbench import (
    Evidence,
    UsageAudit,
    attach_evidence,
    load_hypothesis,
    record_verdict,
    register_hypothesis,
    render_report,
    report_json,
    save_hypothesis,
)


def _open_hypothesis():
    return register_hypothesis(
        statement="labels do not match categories",
        null_statement="the dataset is a good representation for learning concepts",
        dataset_id="20ng",
        label="alt.atheism",
        supporting_ids=[51060],
        label_member_ids=[51060, 51122, 51194],
        hypothesis_id="h1",
    )


def _quantitative() -> Evidence:
    return Evidence(
        kind="neighbor-report",
        payload={"anchor": 51060, "nearest": 51122, "ratio": 214.0},
        provenance={"layout": "lsi-tsne", "seed": 0},
    )


def _qualitative() -> Evidence:
    return Evidence(
        kind="coding-summary",
        payload={"codes": 11, "category_fit": 26},
        provenance={"session": "alt-atheism-first-100"},
    )


def test_register_requires_supporting_ids_in_label():
    with pytest.raises(UnknownSample):
        register_hypothesis(
            statement="s",
            null_statement="n",
            dataset_id="20ng",
            label="alt.atheism",
            supporting_ids=[999],
            label_member_ids=[51060],
        )


def test_register_requires_null_statement():
    with pytest.raises(ValueError):
        register_hypothesis(
            statement="s",
            null_statement="",
            dataset_id="20ng",
            label="alt.atheism",
            supporting_ids=[],
        )


def test_verdict_without_evidence_is_insufficient():
    hypothesis = _open_hypothesis()
    with pytest.raises(InsufficientEvidence):
        record_verdict(hypothesis, "null-rejected", "because")


def test_verdict_with_only_quantitative_evidence_is_insufficient():
    hypothesis = attach_evidence(_open_hypothesis(), _quantitative())
    with pytest.raises(InsufficientEvidence):
        record_verdict(hypothesis, "null-rejected", "because")


def test_verdict_with_only_qualitative_evidence_is_insufficient():
    hypothesis = attach_evidence(_open_hypothesis(), _qualitative())
    with pytest.raises(InsufficientEvidence):
        record_verdict(hypothesis, "null-rejected", "because")


def test_full_workflow_rejects_null():
    hypothesis = _open_hypothesis()
    attach_evidence(hypothesis, _quantitative())
    attach_evidence(hypothesis, _qualitative())
    closed = record_verdict(hypothesis, "null-rejected", "evidence counters the null")
    assert closed.status == "null-rejected"


def test_attach_to_closed_hypothesis_fails():
    hypothesis = _open_hypothesis()
    attach_evidence(hypothesis, _quantitative())
    attach_evidence(hypothesis, _qualitative())
    record_verdict(hypothesis, "null-retained", "held up")
    with pytest.raises(Closed):
        attach_evidence(hypothesis, _qualitative())
    with pytest.raises(Closed):
        record_verdict(hypothesis, "null-rejected", "again")


def _complete_audit() -> UsageAudit:
    return UsageAudit(
        dataset_id="20ng",
        source_given="yes",
        explicit_choice="partial",
        content_stated="yes",
        example_given="no",
        suitability_analyzed="no",
        notes="review row",
    )


def test_report_contains_all_five_audit_fields():
    hypothesis = _open_hypothesis()
    attach_evidence(hypothesis, _quantitative())
    attach_evidence(hypothesis, _qualitative())
    record_verdict(hypothesis, "null-rejected", "r")
    report = render_report(hypothesis, _complete_audit())
    for label in (
        "Source given?",
        "Explicit version choice?",
        "Content stated?",
        "Example given?",
        "Suitability analyzed?",
    ):
        assert label in report
    assert "null-rejected" in report
    assert "incomplete" not in report


def test_missing_audit_field_marks_report_incomplete():
    hypothesis = _open_hypothesis()
    attach_evidence(hypothesis, _quantitative())
    attach_evidence(hypothesis, _qualitative())
    record_verdict(hypothesis, "null-rejected", "r")
    audit = _complete_audit()
    audit.example_given = ""
    report = render_report(hypothesis, audit)
    assert "incomplete" in report
    assert report_json(hypothesis, audit)["complete"] is False


def test_report_regeneration_is_byte_identical(tmp_path):
    hypothesis = _open_hypothesis()
    attach_evidence(hypothesis, _quantitative())
    attach_evidence(hypothesis, _qualitative())
    record_verdict(hypothesis, "null-rejected", "r")
    path = tmp_path / "h1.json"
    save_hypothesis(hypothesis, path)

    audit = _complete_audit()
    first = render_report(load_hypothesis(path), audit)
    second = render_report(load_hypothesis(path), audit)
    assert first == second
    assert first.encode("utf-8") == second.encode("utf-8")


def test_persistence_round_trip(tmp_path):
    hypothesis = _open_hypothesis()
    attach_evidence(hypothesis, _quantitative())
    path = tmp_path / "h.json"
    save_hypothesis(hypothesis, path)
    loaded = load_hypothesis(path)
    assert loaded.as_dict() == hypothesis.as_dict()


def test_bad_verdict_value_rejected():
    hypothesis = _open_hypothesis()
    attach_evidence(hypothesis, _quantitative())
    attach_evidence(hypothesis, _qualitative())
    with pytest.raises(ValueError):
        record_verdict(hypothesis, "maybe", "r")
