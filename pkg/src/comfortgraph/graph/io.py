"""Adjacency-list, census and cell-table file formats."""

from __future__ import annotations

import csv
from pathlib import Path

from ..errors import ValidationError
from .cells import Cell
from .model import AttributedGraph, Relation


def write_adjacency(graph: AttributedGraph, path) -> None:
    """One ``src<TAB>relation<TAB>dst`` line per edge, canonically sorted."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for src, rel, dst in graph.canonical_edges():
            fh.write(f"{src}\t{rel.value}\t{dst}\n")


def read_adjacency(path) -> AttributedGraph:
    edges = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValidationError(f"{path}:{lineno}: expected 3 tab-separated fields")
            try:
                rel = Relation(parts[1])
            except ValueError:
                raise ValidationError(f"{path}:{lineno}: unknown relation {parts[1]!r}") from None
            edges.append((parts[0], rel, parts[2]))
    return AttributedGraph.from_edges(edges)


def write_census(graph: AttributedGraph, path) -> None:
    counts = graph.census()
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "count"])
        for label, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
            w.writerow([label, n])


def write_cells(cells: list[Cell], path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["cell_id", "space_id", "level_id", "row", "col", "x", "y"])
        for c in cells:
            w.writerow([c.id, c.space_id, c.level_id, c.row, c.col, repr(c.center[0]), repr(c.center[1])])


def read_cells(path) -> list[Cell]:
    with open(Path(path), encoding="utf-8") as fh:
        return [Cell(r["cell_id"], (float(r["x"]), float(r["y"])), r["space_id"], r["level_id"], int(r["row"]),
                     int(r["col"])) for r in csv.DictReader(fh)]
