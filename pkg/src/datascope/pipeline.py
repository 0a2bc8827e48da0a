"""End-to-end embedding pipelines: dataset -> matrix -> topic model ->
t-SNE layout, with every artifact written next to a provenance manifest.

This is the composition layer the CLI and the HTTP job runner share; all
the numerics live in the individual modules.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .layout import EmbeddingLayout, write_csv, write_provenance, write_svg
from .lda import lda_fit, lda_embed
from .lsi import lsi_fit, lsi_embed
from .mnist import ImageSet
from .newsgroups import Corpus
from .tsne import TsneConfig, tsne
from .vectorize import VectorizeConfig, build_vector_space, flatten_images


@dataclass
class PipelineConfig:
    model: str = "lsi"  # lsi | lda | raw
    components: int = 50  # k for LSI, K for LDA
    lda_alpha: float | None = None  # None -> 50/K
    lda_beta: float = 0.01
    lda_iterations: int = 500
    vectorizer: VectorizeConfig = field(default_factory=VectorizeConfig)
    tsne: TsneConfig = field(default_factory=TsneConfig)
    seed: int = 0
    subsample: int | None = None  # images only

    def as_dict(self) -> dict:
        return {
            "model": self.model,
            "components": self.components,
            "lda_alpha": self.lda_alpha,
            "lda_beta": self.lda_beta,
            "lda_iterations": self.lda_iterations,
            "vectorizer": self.vectorizer.as_dict(),
            "tsne": self.tsne.as_dict(),
            "seed": self.seed,
            "subsample": self.subsample,
        }


def topic_embedding_for_corpus(corpus: Corpus, config: PipelineConfig):
    """Corpus -> (N x k topic-space matrix, ids, labels, model).

    The LSI rank is clamped to the matrix rank budget so small or heavily
    filtered corpora degrade instead of failing.
    """
    if config.model == "lsi":
        space = build_vector_space(corpus, config.vectorizer)
        k = min(config.components, min(space.shape))
        model = lsi_fit(space, k=k, seed=config.seed)
        embedding = lsi_embed(model, space)
    elif config.model == "lda":
        counts_config = VectorizeConfig(
            min_df=config.vectorizer.min_df,
            max_df_fraction=config.vectorizer.max_df_fraction,
            tokenizer=config.vectorizer.tokenizer,
            quote_lines=config.vectorizer.quote_lines,
            weighting="counts",
            row_norm="none",
        )
        space = build_vector_space(corpus, counts_config)
        model = lda_fit(
            space,
            K=config.components,
            alpha=config.lda_alpha,
            beta=config.lda_beta,
            iterations=config.lda_iterations,
            seed=config.seed,
        )
        embedding = lda_embed(model)
    elif config.model == "raw":
        space = build_vector_space(corpus, config.vectorizer)
        model = None
        embedding = space.matrix.toarray()
    else:
        raise ValueError(f"unknown model {config.model!r}")
    return embedding, list(space.doc_ids), list(space.labels), model


def embedding_for_images(image_set: ImageSet, config: PipelineConfig):
    """ImageSet -> (matrix, indices, labels as strings), optionally
    subsampled deterministically."""
    matrix = flatten_images(image_set)
    ids = list(range(len(image_set)))
    labels = [str(int(v)) for v in image_set.labels]
    if config.subsample is not None and config.subsample < len(ids):
        rng = np.random.default_rng(config.seed)
        chosen = np.sort(rng.choice(len(ids), size=config.subsample, replace=False))
        matrix = matrix[chosen]
        ids = [ids[i] for i in chosen]
        labels = [labels[i] for i in chosen]
    return matrix, ids, labels


def run_tsne_layout(
    embedding: np.ndarray,
    ids: list,
    labels: list[str],
    config: PipelineConfig,
    dataset_id: str,
) -> EmbeddingLayout:
    provenance = {
        "dataset": dataset_id,
        "pipeline": config.as_dict(),
    }
    return tsne(embedding, config.tsne, ids=ids, labels=labels, provenance=provenance)


def save_layout_artifacts(
    layout: EmbeddingLayout,
    embedding: np.ndarray,
    out_dir: str | Path,
    layout_id: str,
    highlight_ids: list | None = None,
) -> dict:
    """Write CSV + SVG + provenance + topic-space embedding, return paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "csv": out_dir / f"{layout_id}.csv",
        "svg": out_dir / f"{layout_id}.svg",
        "provenance": out_dir / f"{layout_id}.provenance.json",
        "embedding": out_dir / f"{layout_id}.embedding.npy",
    }
    write_csv(layout, paths["csv"])
    write_svg(layout, paths["svg"], highlight_ids=highlight_ids)
    write_provenance(layout, paths["provenance"])
    np.save(paths["embedding"], np.asarray(embedding))
    return {name: str(path) for name, path in paths.items()}


def file_sha256(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(
    out_path: str | Path,
    command: str,
    config: dict,
    seeds: dict,
    input_hashes: dict,
    output_paths: dict,
    wall_time_s: float,
) -> None:
    """Run manifest written next to every artifact-producing command's
    output; re-running with the same manifest reproduces seeded outputs."""
    manifest = {
        "command": command,
        "config": config,
        "seeds": seeds,
        "input_hashes": input_hashes,
        "output_paths": output_paths,
        "wall_time_s": wall_time_s,
        "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    Path(out_path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
