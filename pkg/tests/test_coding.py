from __future__ import annotations

import numpy as np
import pytest

from datascope.coding import (
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
from datascope.errors import NotYetSampled, UnknownCode, UnknownLabel


def _view(n: int = 10, label: str = "alt.atheism") -> DatasetView:
    ids = [51000 + i for i in range(n)]
    labels = [label if i % 2 == 0 else "sci.space" for i in range(n)]
    return DatasetView(dataset_id="20ng", sample_ids=ids, labels=labels)


def test_lexicographic_queue_starts_at_smallest_id():
    session = create_session(_view(), "alt.atheism", "lexicographic")
    assert session.queue[0] == 51000
    assert session.queue == sorted(session.queue)


def test_unknown_label_rejected():
    with pytest.raises(UnknownLabel):
        create_session(_view(), "comp.graphics", "lexicographic")


def test_seeded_random_queue_deterministic():
    a = create_session(_view(), "alt.atheism", {"kind": "seeded-random", "seed": 5})
    b = create_session(_view(), "alt.atheism", {"kind": "seeded-random", "seed": 5})
    c = create_session(_view(), "alt.atheism", {"kind": "seeded-random", "seed": 6})
    assert a.queue == b.queue
    assert sorted(a.queue) == sorted(c.queue)


def test_theoretical_queue_ordered_by_anchor_distance():
    ids = [1, 2, 3, 4]
    labels = ["z"] * 4
    points = np.array([[0.0, 0.0], [5.0, 0.0], [1.0, 0.0], [2.0, 0.0]])
    view = DatasetView(dataset_id="d", sample_ids=ids, labels=labels, points=points)
    session = create_session(view, "z", {"kind": "theoretical", "anchors": [1]})
    assert session.queue == [1, 3, 4, 2]


def test_assign_requires_dequeue_first():
    session = create_session(_view(), "alt.atheism")
    with pytest.raises(NotYetSampled):
        assign_code(session, session.queue[0], "anything", create=True)


def test_assign_unknown_code_rejected_without_create():
    session = create_session(_view(), "alt.atheism")
    sample = next_sample(session)
    with pytest.raises(UnknownCode):
        assign_code(session, sample, "nope")


def test_assign_and_summary_count_one():
    session = create_session(_view(), "alt.atheism")
    sample = next_sample(session)
    assign_code(session, sample, "atheism", create=True, matches_category=True)
    summary = code_summary(session)
    assert summary["codes"] == 1
    assert summary["counts"]["atheism"] == 1
    assert summary["category_fit"] == 1


def test_reassignment_replaces_primary_code():
    session = create_session(_view(), "alt.atheism")
    sample = next_sample(session)
    assign_code(session, sample, "a", create=True)
    assign_code(session, sample, "b", create=True)
    summary = code_summary(session)
    assert summary["counts"]["a"] == 0
    assert summary["counts"]["b"] == 1
    assert summary["coded_samples"] == 1
    # ordinals strictly increasing in the assignment view
    ordinals = [a.ordinal for a in session.assignments]
    assert ordinals == sorted(set(ordinals))


def test_queue_and_dequeued_disjoint():
    session = create_session(_view(), "alt.atheism")
    next_sample(session)
    next_sample(session)
    assert not set(session.queue) & set(session.dequeued)


def test_summary_counts_sum_to_distinct_coded_samples():
    session = create_session(_view(20), "alt.atheism")
    for code in ("x", "y", "x", "y", "x"):
        sample = next_sample(session)
        assign_code(session, sample, code, create=True)
    summary = code_summary(session)
    assert sum(summary["counts"].values()) == summary["coded_samples"] == 5


def test_saturation_definition():
    session = create_session(_view(20), "alt.atheism")
    # codes created at assignment ordinals 1, 2, 5
    plan = ["c1", "c2", "c1", "c2", "c3", "c1", "c2", "c3"]
    for code in plan:
        sample = next_sample(session)
        assign_code(session, sample, code, create=True)
    # after ordinal 8, window 3 covers ordinals 6..8: no new codes
    state = saturation_state(session, window=3)
    assert state == {"new_codes_in_window": 0, "saturated": True}
    # window 4 covers ordinal 5, where c3 was created
    state = saturation_state(session, window=4)
    assert state == {"new_codes_in_window": 1, "saturated": False}


def test_saturated_when_last_window_created_no_codes():
    session = create_session(_view(60), "alt.atheism")
    sample = next_sample(session)
    assign_code(session, sample, "only", create=True)
    for _ in range(25):
        sample = next_sample(session)
        assign_code(session, sample, "only")
    assert saturation_state(session, window=25)["saturated"]


def test_replay_reconstructs_exact_state(tmp_path):
    session = create_session(_view(20), "alt.atheism", {"kind": "seeded-random", "seed": 1})
    create_code(session, "pre", description="standalone code")
    for code in ("a", "b", "a"):
        sample = next_sample(session)
        assign_code(session, sample, code, create=True, memo=f"memo {code}")
    path = tmp_path / "session.jsonl"
    write_session(session, path)

    replayed = load_session(path)
    assert replayed.queue == session.queue
    assert replayed.dequeued == session.dequeued
    assert replayed.codebook.names() == session.codebook.names()
    assert code_summary(replayed) == code_summary(session)
    assert [a.__dict__ for a in replayed.assignments] == [
        a.__dict__ for a in session.assignments
    ]
    assert replayed.event_count == session.event_count


def test_replay_of_recorded_100_assignment_session(tmp_path):
    rng = np.random.default_rng(42)
    view = DatasetView(
        dataset_id="20ng",
        sample_ids=list(range(100)),
        labels=["alt.atheism"] * 100,
    )
    session = create_session(view, "alt.atheism")
    codes = [f"code-{rng.integers(0, 11)}" for _ in range(100)]
    for code in codes:
        sample = next_sample(session)
        assign_code(session, sample, code, create=session.codebook.get(code) is None)
    path = tmp_path / "big.jsonl"
    write_session(session, path)
    replayed = load_session(path)
    assert code_summary(replayed) == code_summary(session)
    assert session.assignment_count == 100


def test_import_coding_csv_schema_detection(tmp_path):
    csv_path = tmp_path / "coding.csv"
    csv_path.write_text(
        "document,code\n51060,atheism\n51062,moderation\n51064,atheism\n",
        encoding="utf-8",
    )
    session = import_coding_csv(csv_path, "20ng", "alt.atheism")
    summary = code_summary(session)
    assert summary["codes"] == 2
    assert summary["counts"]["atheism"] == 2
    assert summary["category_fit"] == 2
    assert summary["coded_samples"] == 3


def test_import_coding_csv_fallback_columns(tmp_path):
    csv_path = tmp_path / "nolabel.csv"
    csv_path.write_text("a,b\n1,zero\n2,zero\n3,other\n", encoding="utf-8")
    session = import_coding_csv(csv_path, "mnist", "0", category_code="zero")
    summary = code_summary(session)
    assert summary["category_fit"] == 2


def test_import_coding_csv_semicolon_and_bom(tmp_path):
    csv_path = tmp_path / "semicolon.csv"
    csv_path.write_bytes(
        "﻿document;code\n51060;atheism\n51062;moderation\n".encode("utf-8")
    )
    session = import_coding_csv(csv_path, "20ng", "alt.atheism")
    summary = code_summary(session)
    assert summary["codes"] == 2
    assert summary["category_fit"] == 1
    assert sorted(a.sample for a in session.assignments) == [51060, 51062]


def test_theoretical_queue_missing_embedding_rows_sort_last():
    ids = [1, 2, 3]
    labels = ["z"] * 3
    points = np.array([[0.0, 0.0], [np.nan, np.nan], [1.0, 0.0]])
    view = DatasetView(dataset_id="d", sample_ids=ids, labels=labels, points=points)
    session = create_session(view, "z", {"kind": "theoretical", "anchors": [1]})
    assert session.queue == [1, 3, 2]
