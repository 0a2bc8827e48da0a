from __future__ import annotations

import json

import numpy as np

from datascope.layout import (
    EmbeddingLayout,
    label_colors,
    read_csv,
    write_csv,
    write_provenance,
    write_svg,
)


def _layout(n: int = 6) -> EmbeddingLayout:
    rng = np.random.default_rng(0)
    return EmbeddingLayout(
        points=rng.normal(size=(n, 2)),
        ids=[100 + i for i in range(n)],
        labels=["a" if i % 2 == 0 else "b" for i in range(n)],
        provenance={"dataset": "test", "tsne": {"seed": 0}},
        final_kl=0.5,
    )


def test_csv_round_trip_exact():
    import tempfile

    layout = _layout()
    with tempfile.NamedTemporaryFile(suffix=".csv", mode="w", delete=False) as fh:
        path = fh.name
    write_csv(layout, path)
    ids, points, labels = read_csv(path)
    assert ids == layout.ids
    assert labels == layout.labels
    assert np.array_equal(points, layout.points)  # 17 digits: bit-exact


def test_csv_bytes_deterministic(tmp_path):
    layout = _layout()
    write_csv(layout, tmp_path / "a.csv")
    write_csv(layout, tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_provenance_sidecar(tmp_path):
    layout = _layout()
    write_provenance(layout, tmp_path / "p.json")
    record = json.loads((tmp_path / "p.json").read_text())
    assert record["provenance"]["dataset"] == "test"
    assert record["final_kl"] == 0.5
    assert record["points"] == 6


def test_svg_highlights_and_determinism(tmp_path):
    layout = _layout()
    write_svg(layout, tmp_path / "a.svg", highlight_ids=[101, 104])
    write_svg(layout, tmp_path / "b.svg", highlight_ids=[101, 104])
    svg = (tmp_path / "a.svg").read_text()
    assert svg == (tmp_path / "b.svg").read_text()
    assert svg.count("<circle") == 6
    assert ">101</text>" in svg
    assert ">104</text>" in svg
    assert svg.startswith("<svg")


def test_label_colors_stable_assignment():
    colors = label_colors(["b", "a", "b", "c"])
    assert set(colors) == {"a", "b", "c"}
    assert colors == label_colors(["c", "b", "a"])  # order-independent


def test_point_of_lookup():
    layout = _layout()
    assert np.array_equal(layout.point_of(102), layout.points[2])
