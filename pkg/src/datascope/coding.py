"""Grounded-Theory coding sessions.

A session is an append-only event log: queue creation, sample dequeues,
code creation, code assignment.  State is always reconstructable by
replaying the log, and the on-disk form is line-delimited JSON events
{type, ordinal, timestamp, payload}, one file per session, flushed before
acknowledgment so a crash never loses acknowledged human work.

Two ordinal sequences exist on purpose: every event has a session-global
`ordinal` (the optimistic-concurrency token), while assignments carry
their own 1-based `assignment ordinal` used by saturation windows.
"""

from __future__ import annotations

import csv
import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NotYetSampled, OrdinalConflict, UnknownCode, UnknownLabel, UnknownSample


@dataclass
class Code:
    name: str
    description: str = ""
    matches_category: bool = False
    created_at_sample_ordinal: int = 0


@dataclass
class Codebook:
    codes: list[Code] = field(default_factory=list)

    def get(self, name: str) -> Code | None:
        for code in self.codes:
            if code.name == name:
                return code
        return None

    def names(self) -> list[str]:
        return [code.name for code in self.codes]


@dataclass
class Assignment:
    sample: object
    code: str
    memo: str
    ordinal: int  # assignment ordinal, strictly increasing


@dataclass
class DatasetView:
    """The slice of a dataset a session needs: ids, labels, and (for
    theoretical sampling) the active embedding's points."""

    dataset_id: str
    sample_ids: list
    labels: list
    points: np.ndarray | None = None


@dataclass
class CodingSession:
    session_id: str
    dataset_id: str
    label: str
    strategy: dict
    queue: list = field(default_factory=list)
    dequeued: list = field(default_factory=list)
    codebook: Codebook = field(default_factory=Codebook)
    current_code: dict = field(default_factory=dict)  # sample -> Assignment
    assignment_count: int = 0
    event_count: int = 0
    events: list[dict] = field(default_factory=list)

    @property
    def assignments(self) -> list[Assignment]:
        """Latest assignment per sample, ordered by ordinal."""
        return sorted(self.current_code.values(), key=lambda a: a.ordinal)


def _queue_for(view: DatasetView, label: str, strategy: dict) -> list:
    member_ids = [
        sample_id for sample_id, sample_label in zip(view.sample_ids, view.labels)
        if str(sample_label) == str(label)
    ]
    if not member_ids:
        raise UnknownLabel(f"label {label!r} has no samples in {view.dataset_id!r}")

    kind = strategy.get("kind", "lexicographic")
    if kind == "lexicographic":
        return sorted(member_ids)
    if kind == "seeded-random":
        rng = np.random.default_rng(int(strategy.get("seed", 0)))
        order = rng.permutation(len(member_ids))
        ordered = sorted(member_ids)
        return [ordered[i] for i in order]
    if kind == "theoretical":
        anchors = strategy.get("anchors", [])
        if view.points is None:
            raise ValueError("theoretical sampling needs an active embedding")
        positions = {sample_id: i for i, sample_id in enumerate(view.sample_ids)}
        for anchor in anchors:
            if anchor not in positions:
                raise UnknownSample(f"anchor {anchor!r} not in dataset")
        anchor_points = np.asarray([view.points[positions[a]] for a in anchors])
        ranked = []
        for sample_id in member_ids:
            point = view.points[positions[sample_id]]
            distance = float(np.min(np.linalg.norm(anchor_points - point, axis=1)))
            if not np.isfinite(distance):  # sample missing from the embedding
                distance = np.inf
            ranked.append((distance, sample_id))
        ranked.sort(key=lambda pair: (pair[0], pair[1]))
        return [sample_id for _, sample_id in ranked]
    raise ValueError(f"unknown sampling strategy {kind!r}")


def _apply(session: CodingSession, event: dict) -> None:
    """Apply one event to in-memory state (the single state-transition
    function; both live mutation and replay go through here)."""
    etype = event["type"]
    payload = event["payload"]
    session.event_count = event["ordinal"]
    session.events.append(event)

    if etype == "session-created":
        session.dataset_id = payload["dataset_id"]
        session.label = payload["label"]
        session.strategy = payload["strategy"]
        session.queue = list(payload["queue"])
    elif etype == "sample-dequeued":
        sample = payload["sample"]
        session.queue.remove(sample)
        session.dequeued.append(sample)
    elif etype == "code-created":
        session.codebook.codes.append(
            Code(
                name=payload["name"],
                description=payload.get("description", ""),
                matches_category=payload.get("matches_category", False),
                created_at_sample_ordinal=payload["created_at_sample_ordinal"],
            )
        )
    elif etype == "code-assigned":
        assignment = Assignment(
            sample=payload["sample"],
            code=payload["code"],
            memo=payload.get("memo", ""),
            ordinal=payload["assignment_ordinal"],
        )
        session.current_code[assignment.sample] = assignment
        session.assignment_count = assignment.ordinal
    else:
        raise ValueError(f"unknown event type {etype!r}")


def _event(session: CodingSession, etype: str, payload: dict) -> dict:
    return {
        "type": etype,
        "ordinal": session.event_count + 1,
        "timestamp": time.time(),
        "payload": payload,
    }


def create_session(
    view: DatasetView,
    label: str,
    strategy: dict | str = "lexicographic",
    session_id: str = "session",
) -> CodingSession:
    """New session with the queue fully populated per the strategy.

    Strategies: {"kind": "lexicographic"} (ascending ids),
    {"kind": "seeded-random", "seed": n}, or
    {"kind": "theoretical", "anchors": [ids]} (ascending distance to the
    nearest anchor in the active embedding).  The computed queue is stored
    in the creation event so replay never needs the embedding again.
    """
    if isinstance(strategy, str):
        strategy = {"kind": strategy}
    queue = _queue_for(view, label, strategy)
    session = CodingSession(
        session_id=session_id,
        dataset_id=view.dataset_id,
        label=label,
        strategy=strategy,
    )
    _apply(
        session,
        _event(
            session,
            "session-created",
            {
                "dataset_id": view.dataset_id,
                "label": label,
                "strategy": {k: v for k, v in strategy.items() if k != "anchors"}
                | ({"anchors": list(strategy["anchors"])} if "anchors" in strategy else {}),
                "queue": queue,
            },
        ),
    )
    return session


def next_sample(session: CodingSession):
    """Dequeue the next sample for close reading; None when exhausted."""
    if not session.queue:
        return None
    sample = session.queue[0]
    _apply(session, _event(session, "sample-dequeued", {"sample": sample}))
    return sample


def create_code(
    session: CodingSession,
    name: str,
    description: str = "",
    matches_category: bool = False,
) -> Code:
    if not name:
        raise ValueError("code name must be nonempty")
    if session.codebook.get(name) is not None:
        raise ValueError(f"code {name!r} already exists")
    _apply(
        session,
        _event(
            session,
            "code-created",
            {
                "name": name,
                "description": description,
                "matches_category": matches_category,
                "created_at_sample_ordinal": session.assignment_count,
            },
        ),
    )
    return session.codebook.get(name)


def assign_code(
    session: CodingSession,
    sample,
    code: str,
    memo: str = "",
    create: bool = False,
    description: str = "",
    matches_category: bool = False,
) -> CodingSession:
    """Assign a code to a dequeued sample.

    Unknown codes raise UnknownCode unless create=True, which creates the
    code atomically with this assignment (created_at = this ordinal).
    Re-assignment replaces the sample's current code; the old event stays
    in the log.
    """
    if sample in session.queue:
        raise NotYetSampled(f"sample {sample!r} is still queued; dequeue it first")
    if sample not in session.dequeued:
        raise NotYetSampled(f"sample {sample!r} was never part of this session's queue")
    next_ordinal = session.assignment_count + 1
    if session.codebook.get(code) is None:
        if not create:
            raise UnknownCode(f"code {code!r} is not in the codebook")
        _apply(
            session,
            _event(
                session,
                "code-created",
                {
                    "name": code,
                    "description": description,
                    "matches_category": matches_category,
                    "created_at_sample_ordinal": next_ordinal,
                },
            ),
        )
    _apply(
        session,
        _event(
            session,
            "code-assigned",
            {"sample": sample, "code": code, "memo": memo, "assignment_ordinal": next_ordinal},
        ),
    )
    return session


def code_summary(session: CodingSession) -> dict:
    """Per-code counts plus the count of samples on category-matching codes."""
    counts: dict[str, int] = {code.name: 0 for code in session.codebook.codes}
    for assignment in session.current_code.values():
        counts[assignment.code] = counts.get(assignment.code, 0) + 1
    fit = sum(
        counts.get(code.name, 0)
        for code in session.codebook.codes
        if code.matches_category
    )
    return {
        "codes": len(session.codebook.codes),
        "coded_samples": len(session.current_code),
        "counts": counts,
        "category_fit": fit,
    }


def saturation_state(session: CodingSession, window: int = 25) -> dict:
    """Saturated iff no code was created within the last `window`
    assignments."""
    if window < 1:
        raise ValueError("window must be >= 1")
    cutoff = session.assignment_count - window
    new_codes = [
        code.name
        for code in session.codebook.codes
        if code.created_at_sample_ordinal > cutoff
    ]
    return {"new_codes_in_window": len(new_codes), "saturated": len(new_codes) == 0}


# --- persistence ---------------------------------------------------------


def write_session(session: CodingSession, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for event in session.events:
            fh.write(json.dumps(event, ensure_ascii=False) + "\n")
        fh.flush()
        os.fsync(fh.fileno())


def append_event(path: str | Path, event: dict, expected_ordinal: int | None = None) -> dict:
    """Durably append one event; used by the HTTP layer.

    expected_ordinal is the optimistic-concurrency token: it must equal
    (current event count + 1) or OrdinalConflict is raised.
    """
    session = load_session(path) if Path(path).exists() else None
    current = session.event_count if session else 0
    if expected_ordinal is not None and expected_ordinal != current + 1:
        raise OrdinalConflict(
            f"expected ordinal {expected_ordinal}, log is at {current}"
        )
    event = dict(event, ordinal=current + 1)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(json.dumps(event, ensure_ascii=False) + "\n")
        fh.flush()
        os.fsync(fh.fileno())
    return event


def load_session(path: str | Path, session_id: str | None = None) -> CodingSession:
    """Replay a session log; the result is exactly the live session."""
    session = CodingSession(
        session_id=session_id or Path(path).stem,
        dataset_id="",
        label="",
        strategy={},
    )
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                _apply(session, json.loads(line))
    return session


# --- published-coding import ----------------------------------------------

_ID_COLUMNS = ("document", "document_id", "doc_id", "doc", "id", "sample", "image", "index")
_CODE_COLUMNS = ("code", "codes", "coding", "category", "label_code")


def import_coding_csv(
    path: str | Path,
    dataset_id: str,
    label: str,
    category_code: str | None = None,
    session_id: str = "imported",
) -> CodingSession:
    """Read a published coding table (CSV: one row per sample, a sample-id
    column and a code column) as a read-only session.

    Column detection: the first header matching a known id name (document,
    id, ...) and code name (code, category, ...); otherwise the first two
    columns in order.  Codes equal to `category_code` (case-insensitive;
    default: the last dot-component of the label, e.g. "atheism") are
    flagged as category-matching.
    """
    if category_code is None:
        category_code = label.rsplit(".", 1)[-1]

    # utf-8-sig strips a BOM if present; sniff the delimiter so comma-,
    # semicolon- and tab-separated tables all import
    with open(path, encoding="utf-8-sig", newline="") as fh:
        sample = fh.read(4096)
        fh.seek(0)
        try:
            dialect = csv.Sniffer().sniff(sample, delimiters=",;\t")
        except csv.Error:
            dialect = csv.excel
        reader = csv.reader(fh, dialect)
        header = next(reader)
        normalized = [h.strip().lower() for h in header]
        id_col = next((i for i, h in enumerate(normalized) if h in _ID_COLUMNS), 0)
        code_col = next(
            (i for i, h in enumerate(normalized) if h in _CODE_COLUMNS),
            1 if len(header) > 1 else 0,
        )
        rows = []
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            raw_id = row[id_col].strip()
            sample: object
            try:
                sample = int(raw_id)
            except ValueError:
                sample = raw_id
            rows.append((sample, row[code_col].strip()))

    view = DatasetView(
        dataset_id=dataset_id,
        sample_ids=[sample for sample, _ in rows],
        labels=[label] * len(rows),
    )
    session = create_session(view, label, "lexicographic", session_id=session_id)
    by_sample = dict(rows)  # last row wins if a sample repeats
    for sample in list(session.queue):
        next_sample(session)
        code = by_sample[sample]
        if session.codebook.get(code) is None:
            create_code_matches = code.strip().lower() == category_code.strip().lower()
            assign_code(
                session, sample, code, create=True, matches_category=create_code_matches
            )
        else:
            assign_code(session, sample, code)
    return session
