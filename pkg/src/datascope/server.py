"""HTTP service exposing datasets, statistics, layouts, coding sessions,
and hypotheses.

State layout on disk (under the configured state_dir):

    layouts/{id}.csv / .svg / .provenance.json / .embedding.npy
    sessions/{id}.jsonl          append-only event logs
    hypotheses/{id}.json
    reports/{id}.md / {id}.json

Every error response carries {status, code, message}.  GETs are
side-effect-free; session writes are serialized per session and fsynced
before the acknowledgment leaves the process.
"""

from __future__ import annotations

import io
import json
import os
import threading
import uuid
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from . import coding, corpus_stats, workbench
from .errors import DatascopeError, NotFound, OrdinalConflict
from .layout import read_csv
from .mnist import ImageSet, load_idx_files
from .neighborhood import neighbor_report
from .newsgroups import Corpus, load_tree
from .pipeline import (
    PipelineConfig,
    embedding_for_images,
    run_tsne_layout,
    save_layout_artifacts,
    topic_embedding_for_corpus,
)
from .tsne import TsneConfig
from .vectorize import VectorizeConfig

#: directory name -> corpus version, checked in order for the default
CORPUS_DIRS = (
    ("20news-original", "original"),
    ("20_newsgroups", "original"),
    ("20news-18828", "from-subject-18828"),
    ("20news-bydate", "no-duplicates-18846"),
)

_ERROR_STATUS = {
    "not_found": 404,
    "ordinal_conflict": 409,
    "unknown_label": 422,
    "unknown_code": 422,
    "unknown_sample": 422,
    "not_yet_sampled": 422,
    "closed": 409,
    "insufficient_evidence": 422,
    "version_mismatch": 422,
}


@dataclass
class AppState:
    data_root: Path
    state_dir: Path
    corpora: dict[str, Corpus] = field(default_factory=dict)
    image_sets: dict[str, ImageSet] = field(default_factory=dict)
    jobs: dict[str, dict] = field(default_factory=dict)
    session_locks: dict[str, threading.Lock] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self) -> None:
        for sub in ("layouts", "sessions", "hypotheses", "reports"):
            (self.state_dir / sub).mkdir(parents=True, exist_ok=True)

    # --- datasets -------------------------------------------------------

    def corpus_versions(self) -> list[tuple[str, str, Path]]:
        found = []
        for directory, version in CORPUS_DIRS:
            path = self.data_root / directory
            if path.is_dir():
                found.append((directory, version, path))
        return found

    def mnist_paths(self, split: str) -> tuple[Path, Path] | None:
        base = self.data_root / "mnist"
        prefix = "train" if split == "train" else "t10k"
        # both the dash and dot spellings of the idx suffix circulate
        for sep in ("-", "."):
            for suffix in ("", ".gz"):
                images = base / f"{prefix}-images{sep}idx3-ubyte{suffix}"
                labels = base / f"{prefix}-labels{sep}idx1-ubyte{suffix}"
                if images.is_file() and labels.is_file():
                    return images, labels
        return None

    def get_corpus(self, version: str | None = None) -> Corpus:
        versions = self.corpus_versions()
        if not versions:
            raise NotFound("no 20 Newsgroups tree under the data root")
        if version is None:
            directory, version, path = versions[0]
        else:
            match = [v for v in versions if v[1] == version]
            if not match:
                raise NotFound(f"no tree for corpus version {version!r}")
            directory, version, path = match[0]
        with self.lock:
            if version not in self.corpora:
                documents = load_tree(path)
                self.corpora[version] = Corpus(version=version, documents=documents)
            return self.corpora[version]

    def get_image_set(self, split: str = "train") -> ImageSet:
        with self.lock:
            if split not in self.image_sets:
                paths = self.mnist_paths(split)
                if paths is None:
                    raise NotFound(f"no MNIST {split} files under the data root")
                self.image_sets[split] = load_idx_files(paths[0], paths[1], split=split)
            return self.image_sets[split]

    # --- layouts ----------------------------------------------------------

    def layout_ids(self) -> list[str]:
        return sorted(p.stem for p in (self.state_dir / "layouts").glob("*.csv"))

    def layout_paths(self, layout_id: str) -> dict[str, Path]:
        base = str(self.state_dir / "layouts" / layout_id)
        csv_path = Path(base + ".csv")
        if not csv_path.is_file():
            raise NotFound(f"layout {layout_id!r} not found")
        return {
            "csv": csv_path,
            "provenance": Path(base + ".provenance.json"),
            "embedding": Path(base + ".embedding.npy"),
            "svg": Path(base + ".svg"),
        }

    # --- sessions ---------------------------------------------------------

    def session_path(self, session_id: str) -> Path:
        return self.state_dir / "sessions" / f"{session_id}.jsonl"

    def session_lock(self, session_id: str) -> threading.Lock:
        with self.lock:
            return self.session_locks.setdefault(session_id, threading.Lock())

    def load_session(self, session_id: str) -> coding.CodingSession:
        path = self.session_path(session_id)
        if not path.is_file():
            raise NotFound(f"session {session_id!r} not found")
        return coding.load_session(path, session_id=session_id)

    def append_session_events(self, session_id: str, events: list[dict]) -> None:
        path = self.session_path(session_id)
        with open(path, "a", encoding="utf-8") as fh:
            for event in events:
                fh.write(json.dumps(event, ensure_ascii=False) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    # --- hypotheses ---------------------------------------------------------

    def hypothesis_path(self, hypothesis_id: str) -> Path:
        return self.state_dir / "hypotheses" / f"{hypothesis_id}.json"

    def load_hypothesis(self, hypothesis_id: str) -> workbench.Hypothesis:
        path = self.hypothesis_path(hypothesis_id)
        if not path.is_file():
            raise NotFound(f"hypothesis {hypothesis_id!r} not found")
        return workbench.load_hypothesis(path)


def _dataset_view(state: AppState, dataset: str, layout_id: str | None = None) -> coding.DatasetView:
    if dataset.startswith("20ng"):
        corpus = state.get_corpus()
        points = None
        ids = [d.id for d in corpus.documents]
        labels = [d.label for d in corpus.documents]
    elif dataset.startswith("mnist"):
        split = "test" if dataset.endswith("test") else "train"
        image_set = state.get_image_set(split)
        ids = list(range(len(image_set)))
        labels = [str(int(v)) for v in image_set.labels]
        points = None
    else:
        raise NotFound(f"unknown dataset {dataset!r}")
    if layout_id is not None:
        layout_ids, points_arr, _ = read_csv(state.layout_paths(layout_id)["csv"])
        position = {sample_id: i for i, sample_id in enumerate(layout_ids)}
        points = np.full((len(ids), 2), np.nan)
        for i, sample_id in enumerate(ids):
            if sample_id in position:
                points[i] = points_arr[position[sample_id]]
    return coding.DatasetView(dataset_id=dataset, sample_ids=ids, labels=labels, points=points)


def create_app(data_root: str | Path, state_dir: str | Path) -> FastAPI:
    state = AppState(data_root=Path(data_root), state_dir=Path(state_dir))
    app = FastAPI(title="datascope", version="0.1.0")
    app.state.datascope = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(DatascopeError)
    async def handle_domain_error(request: Request, exc: DatascopeError):
        status = _ERROR_STATUS.get(exc.code, 422)
        return JSONResponse(
            status_code=status,
            content={"status": status, "code": exc.code, "message": str(exc)},
        )

    # --- datasets -------------------------------------------------------

    @app.get("/api/datasets")
    def list_datasets():
        datasets = []
        corpus_versions = state.corpus_versions()
        if corpus_versions:
            datasets.append(
                {
                    "id": "20ng",
                    "kind": "text",
                    "versions": [v for _, v, _ in corpus_versions],
                }
            )
        splits = [s for s in ("train", "test") if state.mnist_paths(s)]
        if splits:
            datasets.append({"id": "mnist", "kind": "image", "splits": splits})
        return datasets

    @app.get("/api/datasets/{dataset_id}/stats")
    def dataset_stats(dataset_id: str, version: str | None = None, line_rule: str = "body"):
        if dataset_id == "20ng":
            corpus = state.get_corpus(version)
            return corpus_stats.stats_report(corpus, line_rule=line_rule)
        if dataset_id == "mnist":
            from .mnist import label_counts

            image_set = state.get_image_set(version or "train")
            return {
                "split": image_set.split,
                "samples": len(image_set),
                "label_counts": {str(k): v for k, v in label_counts(image_set).items()},
            }
        raise NotFound(f"unknown dataset {dataset_id!r}")

    @app.get("/api/datasets/{dataset_id}/documents/{doc_id}")
    def get_document(dataset_id: str, doc_id: int, version: str | None = None):
        if dataset_id != "20ng":
            raise NotFound(f"dataset {dataset_id!r} has no documents")
        corpus = state.get_corpus(version)
        document = corpus.document(doc_id)
        if document is None:
            raise NotFound(f"document {doc_id} not found")
        return {
            "id": document.id,
            "label": document.label,
            "headers": [[name, value] for name, value in document.headers],
            "body": document.body_lines,
            "quote_flags": document.quote_flags,
        }

    @app.get("/api/datasets/{dataset_id}/images/{index}")
    def get_image(dataset_id: str, index: int, split: str = "train", scale: int = 1):
        if dataset_id != "mnist":
            raise NotFound(f"dataset {dataset_id!r} has no images")
        image_set = state.get_image_set(split)
        if not 0 <= index < len(image_set):
            raise NotFound(f"image index {index} out of range")
        from PIL import Image

        pixels = image_set.images[index]
        image = Image.fromarray(pixels, mode="L")
        if scale > 1:
            image = image.resize((28 * scale, 28 * scale), Image.NEAREST)
        buffer = io.BytesIO()
        image.save(buffer, format="PNG")
        return Response(content=buffer.getvalue(), media_type="image/png")

    # --- layouts ----------------------------------------------------------

    @app.get("/api/layouts")
    def list_layouts():
        out = []
        for layout_id in state.layout_ids():
            paths = state.layout_paths(layout_id)
            provenance = {}
            if paths["provenance"].is_file():
                provenance = json.loads(paths["provenance"].read_text(encoding="utf-8"))
            ids, _, _ = read_csv(paths["csv"])
            out.append(
                {
                    "id": layout_id,
                    "points": len(ids),
                    "final_kl": provenance.get("final_kl"),
                    "provenance": provenance.get("provenance", {}),
                }
            )
        return out

    @app.get("/api/layouts/{layout_id}/points")
    def layout_points(layout_id: str, label: str | None = None, session: str | None = None):
        paths = state.layout_paths(layout_id)
        ids, points, labels = read_csv(paths["csv"])
        coded: dict = {}
        if session is not None:
            coded = {
                assignment.sample: assignment.code
                for assignment in state.load_session(session).assignments
            }
        records = []
        for sample_id, (x, y), sample_label in zip(ids, points, labels):
            if label is not None and sample_label != label:
                continue
            record = {"id": sample_id, "x": x, "y": y, "label": sample_label}
            if sample_id in coded:
                record["coded_as"] = coded[sample_id]
            records.append(record)
        return records

    @app.get("/api/layouts/{layout_id}/svg")
    def layout_svg(layout_id: str):
        paths = state.layout_paths(layout_id)
        if not paths["svg"].is_file():
            raise NotFound(f"no SVG for layout {layout_id!r}")
        return Response(content=paths["svg"].read_bytes(), media_type="image/svg+xml")

    # --- neighbors ----------------------------------------------------------

    @app.get("/api/neighbors")
    def neighbors(
        layout: str,
        anchor: str,
        space: str = "layout-space",
        comparison: str | None = None,
    ):
        paths = state.layout_paths(layout)
        ids, points, labels = read_csv(paths["csv"])

        def coerce(value: str):
            try:
                return int(value)
            except ValueError:
                return value

        anchor_id = coerce(anchor)
        comparison_id = coerce(comparison) if comparison is not None else None
        if space == "topic-space":
            if not paths["embedding"].is_file():
                raise NotFound(f"layout {layout!r} has no stored topic-space embedding")
            points = np.load(paths["embedding"])
        elif space != "layout-space":
            raise NotFound(f"unknown space {space!r}")
        report = neighbor_report(
            points, labels, ids, anchor=anchor_id, space=space, comparison=comparison_id
        )
        return report.as_dict()

    # --- sessions -----------------------------------------------------------

    @app.get("/api/sessions")
    def list_sessions():
        out = []
        for path in sorted((state.state_dir / "sessions").glob("*.jsonl")):
            session = coding.load_session(path)
            out.append(
                {
                    "id": path.stem,
                    "dataset": session.dataset_id,
                    "label": session.label,
                    "queued": len(session.queue),
                    "coded": len(session.current_code),
                    "events": session.event_count,
                }
            )
        return out

    @app.post("/api/sessions", status_code=201)
    def create_session_endpoint(body: dict):
        session_id = body.get("session_id") or uuid.uuid4().hex[:12]
        path = state.session_path(session_id)
        if path.exists():
            raise OrdinalConflict(f"session {session_id!r} already exists")
        view = _dataset_view(state, body["dataset"], body.get("layout"))
        session = coding.create_session(
            view, body["label"], body.get("strategy", "lexicographic"), session_id=session_id
        )
        coding.write_session(session, path)
        return {"id": session_id, "queue_length": len(session.queue), "ordinal": session.event_count}

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: str):
        session = state.load_session(session_id)
        summary = coding.code_summary(session)
        return {
            "id": session_id,
            "dataset": session.dataset_id,
            "label": session.label,
            "strategy": session.strategy,
            "queue": session.queue,
            "dequeued": session.dequeued,
            "codebook": [
                {
                    "name": code.name,
                    "description": code.description,
                    "matches_category": code.matches_category,
                    "created_at": code.created_at_sample_ordinal,
                }
                for code in session.codebook.codes
            ],
            "assignments": [
                {"sample": a.sample, "code": a.code, "memo": a.memo, "ordinal": a.ordinal}
                for a in session.assignments
            ],
            "summary": summary,
            "saturation": coding.saturation_state(session),
            "ordinal": session.event_count,
        }

    @app.get("/api/sessions/{session_id}/events")
    def list_events(session_id: str):
        session = state.load_session(session_id)
        return session.events

    @app.post("/api/sessions/{session_id}/events")
    def post_event(session_id: str, body: dict):
        """Apply one coding command; 409 on stale ordinal, 422 on rule
        violations.  The event is durably appended before the ack."""
        command = body.get("type")
        payload = body.get("payload", {})
        expected = body.get("expected_ordinal")
        with state.session_lock(session_id):
            session = state.load_session(session_id)
            if expected is not None and expected != session.event_count + 1:
                raise OrdinalConflict(
                    f"expected ordinal {expected}, log is at {session.event_count}"
                )
            before = len(session.events)
            result: dict = {}
            if command == "next-sample":
                sample = coding.next_sample(session)
                result = {"sample": sample}
            elif command == "assign-code":
                coding.assign_code(
                    session,
                    payload["sample"],
                    payload["code"],
                    memo=payload.get("memo", ""),
                    create=payload.get("create", False),
                    description=payload.get("description", ""),
                    matches_category=payload.get("matches_category", False),
                )
                result = {"sample": payload["sample"], "code": payload["code"]}
            elif command == "create-code":
                coding.create_code(
                    session,
                    payload["name"],
                    description=payload.get("description", ""),
                    matches_category=payload.get("matches_category", False),
                )
                result = {"code": payload["name"]}
            else:
                raise DatascopeError(f"unknown command {command!r}")
            new_events = session.events[before:]
            state.append_session_events(session_id, new_events)
            return {"ordinal": session.event_count, "result": result}

    # --- hypotheses -----------------------------------------------------------

    @app.get("/api/hypotheses")
    def list_hypotheses():
        out = []
        for path in sorted((state.state_dir / "hypotheses").glob("*.json")):
            hypothesis = workbench.load_hypothesis(path)
            out.append(
                {
                    "id": hypothesis.hypothesis_id,
                    "statement": hypothesis.statement,
                    "status": hypothesis.status,
                    "evidence": len(hypothesis.evidence),
                }
            )
        return out

    @app.post("/api/hypotheses", status_code=201)
    def create_hypothesis(body: dict):
        hypothesis_id = body.get("hypothesis_id") or uuid.uuid4().hex[:12]
        view = _dataset_view(state, body["dataset"])
        members = [
            sample_id
            for sample_id, sample_label in zip(view.sample_ids, view.labels)
            if str(sample_label) == str(body["label"])
        ]
        hypothesis = workbench.register_hypothesis(
            statement=body["statement"],
            null_statement=body["null_statement"],
            dataset_id=body["dataset"],
            label=body["label"],
            supporting_ids=body.get("supporting_ids", []),
            label_member_ids=members,
            hypothesis_id=hypothesis_id,
        )
        workbench.save_hypothesis(hypothesis, state.hypothesis_path(hypothesis_id))
        return {"id": hypothesis_id, "status": hypothesis.status}

    @app.get("/api/hypotheses/{hypothesis_id}")
    def get_hypothesis(hypothesis_id: str):
        return state.load_hypothesis(hypothesis_id).as_dict()

    @app.post("/api/hypotheses/{hypothesis_id}/evidence")
    def post_evidence(hypothesis_id: str, body: dict):
        hypothesis = state.load_hypothesis(hypothesis_id)
        workbench.attach_evidence(
            hypothesis,
            workbench.Evidence(
                kind=body["kind"],
                payload=body.get("payload", {}),
                provenance=body.get("provenance", {}),
            ),
        )
        workbench.save_hypothesis(hypothesis, state.hypothesis_path(hypothesis_id))
        return {"id": hypothesis_id, "evidence": len(hypothesis.evidence)}

    @app.post("/api/hypotheses/{hypothesis_id}/verdict")
    def post_verdict(hypothesis_id: str, body: dict):
        hypothesis = state.load_hypothesis(hypothesis_id)
        workbench.record_verdict(hypothesis, body["verdict"], body.get("rationale", ""))
        workbench.save_hypothesis(hypothesis, state.hypothesis_path(hypothesis_id))
        return {"id": hypothesis_id, "status": hypothesis.status}

    # --- reports ---------------------------------------------------------------

    @app.post("/api/reports/{hypothesis_id}")
    def build_report(hypothesis_id: str, body: dict):
        hypothesis = state.load_hypothesis(hypothesis_id)
        audit = workbench.UsageAudit(
            dataset_id=hypothesis.dataset_id,
            **{k: body.get(k, "") for k in workbench.AUDIT_FIELDS},
            notes=body.get("notes", ""),
        )
        markdown = workbench.render_report(hypothesis, audit)
        twin = workbench.report_json(hypothesis, audit)
        report_dir = state.state_dir / "reports"
        (report_dir / f"{hypothesis_id}.md").write_text(markdown, encoding="utf-8")
        (report_dir / f"{hypothesis_id}.json").write_text(
            json.dumps(twin, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        return {"id": hypothesis_id, "complete": twin["complete"]}

    @app.get("/api/reports/{hypothesis_id}")
    def get_report(hypothesis_id: str, format: str = "markdown"):
        report_dir = state.state_dir / "reports"
        if format == "json":
            path = report_dir / f"{hypothesis_id}.json"
            if not path.is_file():
                raise NotFound(f"report {hypothesis_id!r} not found")
            return json.loads(path.read_text(encoding="utf-8"))
        path = report_dir / f"{hypothesis_id}.md"
        if not path.is_file():
            raise NotFound(f"report {hypothesis_id!r} not found")
        return Response(content=path.read_bytes(), media_type="text/markdown")

    # --- jobs ---------------------------------------------------------------

    def _run_embed_job(job_id: str, body: dict) -> None:
        job = state.jobs[job_id]
        try:
            job["status"] = "running"
            job["progress"] = 0.1
            config = _pipeline_config_from(body)
            dataset = body["dataset"]
            if dataset.startswith("20ng"):
                corpus = state.get_corpus(body.get("version"))
                embedding, ids, labels, _ = topic_embedding_for_corpus(corpus, config)
            else:
                split = "test" if dataset.endswith("test") else "train"
                image_set = state.get_image_set(split)
                embedding, ids, labels = embedding_for_images(image_set, config)
            job["progress"] = 0.5
            layout = run_tsne_layout(embedding, ids, labels, config, dataset)
            layout_id = body.get("layout_id") or f"{dataset}-{config.model}-{job_id[:8]}"
            save_layout_artifacts(
                layout, embedding, state.state_dir / "layouts", layout_id,
                highlight_ids=body.get("highlight_ids"),
            )
            job["progress"] = 1.0
            job["status"] = "done"
            job["result"] = {"layout": layout_id, "final_kl": layout.final_kl}
        except Exception as exc:  # surfaced through the job status
            job["status"] = "failed"
            job["error"] = f"{type(exc).__name__}: {exc}"

    @app.post("/api/jobs/embed", status_code=202)
    def submit_embed_job(body: dict):
        job_id = uuid.uuid4().hex
        state.jobs[job_id] = {"status": "queued", "progress": 0.0}
        thread = threading.Thread(target=_run_embed_job, args=(job_id, body), daemon=True)
        thread.start()
        return {"job": job_id}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        job = state.jobs.get(job_id)
        if job is None:
            raise NotFound(f"job {job_id!r} not found")
        return {"job": job_id, **job}

    return app


def _pipeline_config_from(body: dict) -> PipelineConfig:
    vectorizer = VectorizeConfig(**body.get("vectorizer", {})) if "vectorizer" in body else VectorizeConfig()
    seed = int(body.get("seed", 0))
    tsne_body = dict(body.get("tsne", {}))
    tsne_body.setdefault("seed", seed)  # t-SNE inherits the job seed unless set
    return PipelineConfig(
        model=body.get("model", "lsi"),
        components=int(body.get("components", 50)),
        lda_alpha=body.get("lda_alpha"),
        lda_beta=float(body.get("lda_beta", 0.01)),
        lda_iterations=int(body.get("lda_iterations", 500)),
        vectorizer=vectorizer,
        tsne=TsneConfig(**tsne_body),
        seed=seed,
        subsample=body.get("subsample"),
    )


def resolve_serve_config(
    port: int | None = None,
    data_root: str | None = None,
    state_dir: str | None = None,
) -> tuple[int, str, str]:
    """Explicit arguments win; DATASCOPE_PORT / DATASCOPE_DATA_ROOT /
    DATASCOPE_STATE_DIR fill the gaps, then built-in defaults."""
    if port is None:
        port = int(os.environ.get("DATASCOPE_PORT", "8377"))
    data_root = data_root or os.environ.get("DATASCOPE_DATA_ROOT", "data")
    state_dir = state_dir or os.environ.get("DATASCOPE_STATE_DIR", "state")
    return port, data_root, state_dir


def serve(
    port: int | None = None,
    data_root: str | None = None,
    state_dir: str | None = None,
) -> None:
    import uvicorn

    port, data_root, state_dir = resolve_serve_config(port, data_root, state_dir)
    app = create_app(data_root, state_dir)
    uvicorn.run(app, host="127.0.0.1", port=port)
