"""Same-label neighbor queries over embeddings and layouts.

Exhaustive Euclidean scans, no spatial index: results are exactly
reproducible and fast enough at corpus scale.  Ties break toward the
smaller sample id so outputs are unique.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoNeighbor


@dataclass
class NeighborReport:
    anchor: object
    label: str
    space: str  # topic-space | layout-space
    metric: str  # euclidean
    nearest: tuple[object, float]
    farthest: tuple[object, float]
    ratio: float  # farthest / nearest
    comparison: object | None = None
    comparison_distance: float | None = None
    comparison_ratio: float | None = None  # d(anchor, comparison) / nearest
    distances: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        def jsonable(value: float | None):
            # strict JSON has no Infinity; an unbounded ratio becomes null
            # next to the distances that imply it
            if value is None or not np.isfinite(value):
                return None
            return value

        return {
            "anchor": self.anchor,
            "label": self.label,
            "space": self.space,
            "metric": self.metric,
            "nearest": {"id": self.nearest[0], "distance": self.nearest[1]},
            "farthest": {"id": self.farthest[0], "distance": self.farthest[1]},
            "ratio": jsonable(self.ratio),
            "comparison": None
            if self.comparison is None
            else {
                "id": self.comparison,
                "distance": self.comparison_distance,
                "ratio_to_nearest": jsonable(self.comparison_ratio),
            },
        }


def _same_label_distances(points, labels, ids, anchor, label):
    points = np.asarray(points, dtype=np.float64)
    try:
        anchor_pos = ids.index(anchor)
    except ValueError:
        raise NoNeighbor(f"anchor {anchor!r} not in the point set") from None
    anchor_point = points[anchor_pos]

    candidates: list[tuple[object, float]] = []
    for pos, (sample_id, sample_label) in enumerate(zip(ids, labels)):
        if sample_label != label or pos == anchor_pos:
            continue
        distance = float(np.linalg.norm(points[pos] - anchor_point))
        candidates.append((sample_id, distance))
    if not candidates:
        raise NoNeighbor(f"label {label!r} has no point besides the anchor")
    return anchor_point, candidates


def _safe_ratio(numerator: float, denominator: float) -> float:
    """farthest/nearest with honest edge cases: 1.0 when both distances are
    zero (all candidates coincide with the anchor), inf when only the
    nearest does (a duplicate document sits at distance 0)."""
    if denominator > 0:
        return numerator / denominator
    return 1.0 if numerator == 0 else float("inf")


def _extreme(candidates: list[tuple[object, float]], want_max: bool) -> tuple[object, float]:
    # distance ties break toward the smaller id, for both directions
    best = candidates[0]
    for candidate in candidates[1:]:
        better = candidate[1] > best[1] if want_max else candidate[1] < best[1]
        if better or (candidate[1] == best[1] and candidate[0] < best[0]):
            best = candidate
    return best


def nearest_in_label(points, labels, ids, anchor, label) -> tuple[object, float]:
    """Closest same-label point to the anchor (anchor excluded)."""
    _, candidates = _same_label_distances(points, labels, ids, anchor, label)
    return _extreme(candidates, want_max=False)


def farthest_in_label(points, labels, ids, anchor, label) -> tuple[object, float]:
    """Most distant same-label point to the anchor (anchor excluded)."""
    _, candidates = _same_label_distances(points, labels, ids, anchor, label)
    return _extreme(candidates, want_max=True)


def neighbor_report(
    points,
    labels,
    ids,
    anchor,
    space: str = "topic-space",
    comparison=None,
    include_distances: bool = False,
) -> NeighborReport:
    """Nearest + farthest same-label query, optional comparison-id ratio.

    The comparison ratio d(anchor, comparison) / d(anchor, nearest) is the
    quantity inspected when asking how much farther a suspicious document
    sits than the anchor's closest same-label neighbor.
    """
    try:
        anchor_pos = ids.index(anchor)
    except ValueError:
        raise NoNeighbor(f"anchor {anchor!r} not in the point set") from None
    label = labels[anchor_pos]

    anchor_point, candidates = _same_label_distances(points, labels, ids, anchor, label)
    nearest = _extreme(candidates, want_max=False)
    farthest = _extreme(candidates, want_max=True)
    ratio = _safe_ratio(farthest[1], nearest[1])

    report = NeighborReport(
        anchor=anchor,
        label=label,
        space=space,
        metric="euclidean",
        nearest=nearest,
        farthest=farthest,
        ratio=ratio,
        distances={c[0]: c[1] for c in candidates} if include_distances else {},
    )
    if comparison is not None:
        points_arr = np.asarray(points, dtype=np.float64)
        try:
            comparison_pos = ids.index(comparison)
        except ValueError:
            raise NoNeighbor(f"comparison id {comparison!r} not in the point set") from None
        distance = float(np.linalg.norm(points_arr[comparison_pos] - anchor_point))
        report.comparison = comparison
        report.comparison_distance = distance
        report.comparison_ratio = _safe_ratio(distance, nearest[1])
    return report


def format_report(report: NeighborReport) -> str:
    lines = [
        f"anchor    : {report.anchor} (label {report.label}, {report.space}, {report.metric})",
        f"nearest   : {report.nearest[0]}  d={report.nearest[1]:.6g}",
        f"farthest  : {report.farthest[0]}  d={report.farthest[1]:.6g}",
        f"far/near  : {report.ratio:.6g}",
    ]
    if report.comparison is not None:
        lines.append(
            f"comparison: {report.comparison}  d={report.comparison_distance:.6g}  "
            f"d/nearest={report.comparison_ratio:.6g}"
        )
    return "\n".join(lines)
