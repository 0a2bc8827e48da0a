"""Command-line driver for the full pipeline.

Subcommands: ingest | stats | embed | neighbors | session | report | serve.
Seeded commands are reproducible byte-for-byte from their manifest; every
artifact-producing command writes `<output>.manifest.json` next to its
output.

Exit codes: 0 success, 1 assertion/acceptance failure, 2 usage or
environment error.  `--json` switches human tables to machine output on
stdout; diagnostics go to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import coding, corpus_stats, workbench
from .errors import DatascopeError
from .layout import read_csv
from .mnist import load_idx_files
from .neighborhood import format_report as format_neighbor_report
from .neighborhood import neighbor_report
from .newsgroups import VERSION_SIZES, Corpus, export_jsonl, load_corpus, load_tree
from .pipeline import (
    PipelineConfig,
    embedding_for_images,
    file_sha256,
    run_tsne_layout,
    save_layout_artifacts,
    topic_embedding_for_corpus,
    write_manifest,
)
from .tsne import TsneConfig
from .vectorize import CASE_STUDY_TEXT_CONFIG, VectorizeConfig


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    try:
        import tomllib
    except ImportError:  # python 3.10
        import tomli as tomllib
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _merge_config(args: argparse.Namespace, file_config: dict, command: str) -> None:
    """File values fill in only options the user left at their default
    (flags win over the file)."""
    section = file_config.get(command, {})
    for key, value in section.items():
        attr = key.replace("-", "_")
        if hasattr(args, attr) and getattr(args, attr) == _PARSER_DEFAULTS.get((command, attr)):
            setattr(args, attr, value)


_PARSER_DEFAULTS: dict[tuple[str, str], object] = {}


def _remember_defaults(command: str, parser: argparse.ArgumentParser) -> None:
    for action in parser._actions:
        if action.dest != "help":
            _PARSER_DEFAULTS[(command, action.dest)] = action.default


def _corpus_from_args(args: argparse.Namespace) -> Corpus:
    root = Path(args.root)
    if not root.is_dir():
        raise SystemExit2(f"data root {root} does not exist")
    if args.strict:
        return load_corpus(root, args.version)
    documents = load_tree(root)
    return Corpus(version=args.version, documents=documents)


class SystemExit2(Exception):
    """Usage/environment error, mapped to exit code 2."""


def cmd_ingest(args: argparse.Namespace) -> int:
    started = time.monotonic()
    if args.dataset == "20ng":
        corpus = _corpus_from_args(args)
        out = Path(args.out or "corpus.jsonl")
        count = export_jsonl(corpus, out)
        outputs = {"corpus": str(out)}
        config = {"dataset": "20ng", "version": args.version, "root": str(args.root)}
        print(f"wrote {count} documents to {out}", file=sys.stderr)
    elif args.dataset == "mnist":
        images = Path(args.images)
        labels = Path(args.labels)
        if not images.is_file() or not labels.is_file():
            raise SystemExit2("MNIST image/label files not found")
        image_set = load_idx_files(images, labels, split=args.split)
        out = Path(args.out or f"mnist-{args.split}.npz")
        import numpy as np

        np.savez_compressed(out, images=image_set.images, labels=image_set.labels)
        outputs = {"npz": str(out)}
        config = {"dataset": "mnist", "split": args.split}
        print(f"parsed {len(image_set)} samples to {out}", file=sys.stderr)
    else:
        raise SystemExit2(f"unknown dataset {args.dataset!r}")
    write_manifest(
        str(out) + ".manifest.json",
        command="ingest",
        config=config,
        seeds={},
        input_hashes={},
        output_paths=outputs,
        wall_time_s=time.monotonic() - started,
    )
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    corpus = _corpus_from_args(args)
    report = corpus_stats.stats_report(corpus, line_rule=args.line_rule)
    if args.json:
        print(json.dumps(report, indent=2, sort_keys=True))
    else:
        print(corpus_stats.format_report(report))
    if args.out:
        started = time.monotonic()
        Path(args.out).write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        write_manifest(
            args.out + ".manifest.json",
            command="stats",
            config={"version": args.version, "line_rule": args.line_rule},
            seeds={},
            input_hashes={},
            output_paths={"report": args.out},
            wall_time_s=time.monotonic() - started,
        )
    return 0


def _pipeline_config(args: argparse.Namespace) -> PipelineConfig:
    if args.case_study_text:
        vectorizer = CASE_STUDY_TEXT_CONFIG
    else:
        vectorizer = VectorizeConfig(
            min_df=args.min_df,
            max_df_fraction=args.max_df,
            quote_lines="exclude" if args.exclude_quotes else "include",
            weighting=args.weighting,
            row_norm="L2" if args.weighting == "tfidf" else "none",
        )
    tsne_config = TsneConfig(
        perplexity=args.perplexity,
        iterations=args.tsne_iterations,
        exaggeration_iterations=args.exaggeration_iterations,
        seed=args.seed,
        method=args.tsne_method,
    )
    return PipelineConfig(
        model=args.model,
        components=args.components,
        lda_iterations=args.lda_iterations,
        vectorizer=vectorizer,
        tsne=tsne_config,
        seed=args.seed,
        subsample=args.subsample,
    )


def cmd_embed(args: argparse.Namespace) -> int:
    started = time.monotonic()
    config = _pipeline_config(args)
    if args.dataset == "20ng":
        corpus = _corpus_from_args(args)
        embedding, ids, labels, _ = topic_embedding_for_corpus(corpus, config)
        dataset_id = f"20ng-{args.version}"
    elif args.dataset == "mnist":
        images = Path(args.images)
        labels_path = Path(args.labels)
        if not images.is_file() or not labels_path.is_file():
            raise SystemExit2("MNIST image/label files not found")
        image_set = load_idx_files(images, labels_path, split=args.split)
        embedding, ids, labels = embedding_for_images(image_set, config)
        dataset_id = f"mnist-{args.split}"
    else:
        raise SystemExit2(f"unknown dataset {args.dataset!r}")

    layout = run_tsne_layout(embedding, ids, labels, config, dataset_id)
    layout_id = args.layout_id or f"{dataset_id}-{config.model}-seed{args.seed}"
    highlight = [int(x) for x in args.highlight.split(",")] if args.highlight else None
    paths = save_layout_artifacts(
        layout, embedding, args.out_dir, layout_id, highlight_ids=highlight
    )
    write_manifest(
        Path(args.out_dir) / f"{layout_id}.manifest.json",
        command="embed",
        config={"dataset": dataset_id, "pipeline": config.as_dict()},
        seeds={"pipeline": config.seed, "tsne": layout.provenance["tsne"]["seed"]},
        input_hashes={},
        output_paths=paths,
        wall_time_s=time.monotonic() - started,
    )
    print(f"layout {layout_id}: {len(layout)} points, final KL {layout.final_kl:.4f}", file=sys.stderr)
    print(paths["csv"])
    return 0


def cmd_neighbors(args: argparse.Namespace) -> int:
    import numpy as np

    csv_path = Path(args.layout)
    if not csv_path.is_file():
        raise SystemExit2(f"layout CSV {csv_path} not found")
    ids, points, labels = read_csv(csv_path)
    if args.space == "topic-space":
        stem = str(csv_path)[: -len(".csv")] if str(csv_path).endswith(".csv") else str(csv_path)
        embedding_path = Path(stem + ".embedding.npy")
        if not embedding_path.is_file():
            raise SystemExit2(f"no stored embedding next to {csv_path}")
        points = np.load(embedding_path)

    def coerce(value: str | None):
        if value is None:
            return None
        try:
            return int(value)
        except ValueError:
            return value

    report = neighbor_report(
        points,
        labels,
        ids,
        anchor=coerce(args.anchor),
        space=args.space,
        comparison=coerce(args.comparison),
    )
    if args.json:
        print(json.dumps(report.as_dict(), indent=2, sort_keys=True))
    else:
        print(format_neighbor_report(report))
    return 0


def cmd_session(args: argparse.Namespace) -> int:
    if args.session_command == "import":
        session = coding.import_coding_csv(
            args.csv, args.dataset, args.label,
            category_code=args.category_code, session_id=args.session_id,
        )
        coding.write_session(session, args.out)
        summary = coding.code_summary(session)
        print(json.dumps(summary, indent=2, sort_keys=True))
        return 0
    if args.session_command == "replay":
        session = coding.load_session(args.file)
        summary = coding.code_summary(session)
        payload = {
            "session": session.session_id,
            "dataset": session.dataset_id,
            "label": session.label,
            "summary": summary,
            "saturation": coding.saturation_state(session, window=args.window),
        }
        print(json.dumps(payload, indent=2, sort_keys=True))
        return 0
    if args.session_command == "export":
        session = coding.load_session(args.file)
        rows = ["sample,code,memo,ordinal"]
        for assignment in session.assignments:
            rows.append(f"{assignment.sample},{assignment.code},{assignment.memo},{assignment.ordinal}")
        output = "\n".join(rows) + "\n"
        if args.out:
            Path(args.out).write_text(output, encoding="utf-8")
        else:
            print(output, end="")
        return 0
    raise SystemExit2(f"unknown session command {args.session_command!r}")


def cmd_report(args: argparse.Namespace) -> int:
    hypothesis = workbench.load_hypothesis(args.hypothesis)
    audit_values = json.loads(Path(args.audit).read_text(encoding="utf-8")) if args.audit else {}
    audit = workbench.UsageAudit(
        dataset_id=hypothesis.dataset_id,
        **{k: audit_values.get(k, "") for k in workbench.AUDIT_FIELDS},
        notes=audit_values.get("notes", ""),
    )
    markdown = workbench.render_report(hypothesis, audit)
    if args.out:
        Path(args.out).write_text(markdown, encoding="utf-8")
        twin = workbench.report_json(hypothesis, audit)
        Path(args.out).with_suffix(".json").write_text(
            json.dumps(twin, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(args.out)
    else:
        print(markdown)
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    from .server import serve

    serve(port=args.port, data_root=args.data_root, state_dir=args.state_dir)
    return 0


def _add_corpus_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--root", required=True, help="20 Newsgroups tree (directory per label)")
    parser.add_argument(
        "--version",
        default="original",
        choices=sorted(VERSION_SIZES),
        help="dataset version the tree claims to be",
    )
    parser.add_argument(
        "--strict",
        action="store_true",
        help="fail unless the tree has exactly the version's documented size",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="datascope", description=__doc__)
    parser.add_argument("--config", help="optional TOML config file; flags win over file values")
    sub = parser.add_subparsers(dest="command", required=True)

    p_ingest = sub.add_parser("ingest", help="parse a raw dataset and export it normalized")
    p_ingest.add_argument("--dataset", required=True, choices=["20ng", "mnist"])
    p_ingest.add_argument("--root", help="20ng tree root")
    p_ingest.add_argument("--version", default="original", choices=sorted(VERSION_SIZES))
    p_ingest.add_argument("--strict", action="store_true")
    p_ingest.add_argument("--images", help="mnist images idx file")
    p_ingest.add_argument("--labels", help="mnist labels idx file")
    p_ingest.add_argument("--split", default="train", choices=["train", "test"])
    p_ingest.add_argument("--out", help="output path")
    p_ingest.set_defaults(func=cmd_ingest)
    _remember_defaults("ingest", p_ingest)

    p_stats = sub.add_parser("stats", help="descriptive corpus statistics")
    _add_corpus_options(p_stats)
    p_stats.add_argument("--line-rule", default="body", choices=["body", "body+headers"])
    p_stats.add_argument("--json", action="store_true")
    p_stats.add_argument("--out", help="also write the JSON report here")
    p_stats.set_defaults(func=cmd_stats)
    _remember_defaults("stats", p_stats)

    p_embed = sub.add_parser("embed", help="run a topic-model + t-SNE pipeline to a 2-D layout")
    p_embed.add_argument("--dataset", required=True, choices=["20ng", "mnist"])
    p_embed.add_argument("--root", help="20ng tree root")
    p_embed.add_argument("--version", default="original", choices=sorted(VERSION_SIZES))
    p_embed.add_argument("--strict", action="store_true")
    p_embed.add_argument("--images")
    p_embed.add_argument("--labels")
    p_embed.add_argument("--split", default="train", choices=["train", "test"])
    p_embed.add_argument("--model", default="lsi", choices=["lsi", "lda", "raw"])
    p_embed.add_argument("--components", type=int, default=50)
    p_embed.add_argument("--lda-iterations", type=int, default=500)
    p_embed.add_argument("--min-df", type=int, default=5)
    p_embed.add_argument("--max-df", type=float, default=0.5)
    p_embed.add_argument("--weighting", default="tfidf", choices=["tfidf", "counts"])
    p_embed.add_argument("--exclude-quotes", action="store_true", default=True)
    p_embed.add_argument("--include-quotes", dest="exclude_quotes", action="store_false")
    p_embed.add_argument("--case-study-text", action="store_true",
                         help="use the text case-study vectorizer preset")
    p_embed.add_argument("--perplexity", type=float, default=30.0)
    p_embed.add_argument("--tsne-iterations", type=int, default=1000)
    p_embed.add_argument("--exaggeration-iterations", type=int, default=250)
    p_embed.add_argument("--tsne-method", default="exact", choices=["exact", "barnes_hut"])
    p_embed.add_argument("--seed", type=int, default=0)
    p_embed.add_argument("--subsample", type=int, help="images: embed only this many samples")
    p_embed.add_argument("--out-dir", default="layouts")
    p_embed.add_argument("--layout-id")
    p_embed.add_argument("--highlight", help="comma-separated sample ids to emphasize in the SVG")
    p_embed.set_defaults(func=cmd_embed)
    _remember_defaults("embed", p_embed)

    p_neighbors = sub.add_parser("neighbors", help="same-label nearest/farthest report")
    p_neighbors.add_argument("--layout", required=True, help="layout CSV path")
    p_neighbors.add_argument("--anchor", required=True)
    p_neighbors.add_argument("--comparison")
    p_neighbors.add_argument("--space", default="layout-space",
                             choices=["layout-space", "topic-space"])
    p_neighbors.add_argument("--json", action="store_true")
    p_neighbors.set_defaults(func=cmd_neighbors)
    _remember_defaults("neighbors", p_neighbors)

    p_session = sub.add_parser("session", help="coding session import/replay/export")
    session_sub = p_session.add_subparsers(dest="session_command", required=True)
    p_import = session_sub.add_parser("import", help="published coding CSV -> session log")
    p_import.add_argument("--csv", required=True)
    p_import.add_argument("--dataset", required=True)
    p_import.add_argument("--label", required=True)
    p_import.add_argument("--category-code", help="code name that counts as category-matching")
    p_import.add_argument("--session-id", default="imported")
    p_import.add_argument("--out", required=True)
    p_replay = session_sub.add_parser("replay", help="replay a session log and print its summary")
    p_replay.add_argument("--file", required=True)
    p_replay.add_argument("--window", type=int, default=25)
    p_export = session_sub.add_parser("export", help="session log -> assignments CSV")
    p_export.add_argument("--file", required=True)
    p_export.add_argument("--out")
    p_session.set_defaults(func=cmd_session)
    _remember_defaults("session", p_session)

    p_report = sub.add_parser("report", help="render a hypothesis report")
    p_report.add_argument("--hypothesis", required=True, help="hypothesis JSON path")
    p_report.add_argument("--audit", help="JSON file with the five audit fields")
    p_report.add_argument("--out")
    p_report.set_defaults(func=cmd_report)
    _remember_defaults("report", p_report)

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--port", type=int)
    p_serve.add_argument("--data-root")
    p_serve.add_argument("--state-dir")
    p_serve.set_defaults(func=cmd_serve)
    _remember_defaults("serve", p_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        file_config = _load_config_file(args.config)
        if file_config:
            _merge_config(args, file_config, args.command)
        return args.func(args)
    except SystemExit2 as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DatascopeError as exc:
        print(f"error ({exc.code}): {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
