"""2-D embedding layouts and their file formats.

A layout is never just points: it carries the provenance record (dataset,
vectorizer config, topic-model config, DR config, seed) that suffices to
re-run the pipeline, plus the final KL divergence of the optimization.

Exports are deterministic byte-for-byte: CSV with fixed float formatting,
a JSON provenance sidecar with sorted keys, and a hand-rolled SVG scatter
(no timestamps, no generated ids).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

# 20-color palette; assigned to label names in sorted order
_PALETTE = (
    "#1f77b4", "#aec7e8", "#ff7f0e", "#ffbb78", "#2ca02c",
    "#98df8a", "#d62728", "#ff9896", "#9467bd", "#c5b0d5",
    "#8c564b", "#c49c94", "#e377c2", "#f7b6d2", "#7f7f7f",
    "#c7c7c7", "#bcbd22", "#dbdb8d", "#17becf", "#9edae5",
)


@dataclass
class EmbeddingLayout:
    points: np.ndarray  # N x 2
    ids: list  # per-point sample id (document id or image index)
    labels: list[str]
    provenance: dict
    final_kl: float
    kl_trace: list[tuple[int, float]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.ids)

    def point_of(self, sample_id) -> np.ndarray:
        idx = self.ids.index(sample_id)
        return self.points[idx]


def write_csv(layout: EmbeddingLayout, path: str | Path) -> None:
    """CSV with header "id,x,y,label"; floats at 17 significant digits so
    identical layouts produce identical bytes."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id,x,y,label\n")
        for sample_id, (x, y), label in zip(layout.ids, layout.points, layout.labels):
            fh.write(f"{sample_id},{x:.17g},{y:.17g},{label}\n")


def read_csv(path: str | Path) -> tuple[list, np.ndarray, list[str]]:
    ids: list = []
    labels: list[str] = []
    coords: list[tuple[float, float]] = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != "id,x,y,label":
            raise ValueError(f"unexpected layout CSV header: {header!r}")
        for line in fh:
            sample_id, x, y, label = line.rstrip("\n").split(",", 3)
            try:
                ids.append(int(sample_id))
            except ValueError:
                ids.append(sample_id)
            coords.append((float(x), float(y)))
            labels.append(label)
    return ids, np.array(coords, dtype=np.float64), labels


def write_provenance(layout: EmbeddingLayout, path: str | Path) -> None:
    record = {
        "provenance": layout.provenance,
        "final_kl": layout.final_kl,
        "points": len(layout),
    }
    Path(path).write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def label_colors(labels: list[str]) -> dict[str, str]:
    unique = sorted(set(labels))
    return {name: _PALETTE[i % len(_PALETTE)] for i, name in enumerate(unique)}


def write_svg(
    layout: EmbeddingLayout,
    path: str | Path,
    size: int = 800,
    radius: float = 2.0,
    highlight_ids: list | None = None,
) -> None:
    """Figure-style scatter: points colored by label, highlighted ids drawn
    larger with a black ring and id caption."""
    highlight = set(highlight_ids or [])
    points = layout.points
    lo = points.min(axis=0)
    hi = points.max(axis=0)
    span = np.where(hi - lo > 0, hi - lo, 1.0)
    margin = 0.05 * size

    def sx(x: float) -> float:
        return margin + (x - lo[0]) / span[0] * (size - 2 * margin)

    def sy(y: float) -> float:
        # flip so larger y is up, like a plot
        return size - (margin + (y - lo[1]) / span[1] * (size - 2 * margin))

    colors = label_colors(layout.labels)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    deferred: list[str] = []
    for sample_id, (x, y), label in zip(layout.ids, points, layout.labels):
        cx, cy = sx(x), sy(y)
        color = colors[label]
        if sample_id in highlight:
            deferred.append(
                f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{radius * 3:.2f}" '
                f'fill="{color}" stroke="black" stroke-width="1.5"/>'
                f'<text x="{cx + radius * 3 + 2:.2f}" y="{cy:.2f}" '
                f'font-size="11" font-family="sans-serif">{sample_id}</text>'
            )
        else:
            parts.append(
                f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="{radius:.2f}" '
                f'fill="{color}" fill-opacity="0.6"/>'
            )
    parts.extend(deferred)  # highlighted markers on top
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
