"""Typed node/edge container for the building graph."""

from __future__ import annotations

import copy
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable

import numpy as np

from ..errors import ValidationError


class Relation(str, Enum):
    ADJACENT = "ADJACENT"
    IN_AOI_OF = "IN_AOI_OF"
    CONTAINED_IN = "CONTAINED_IN"
    ON_LEVEL = "ON_LEVEL"
    HAS_ATTRIBUTE = "HAS_ATTRIBUTE"
    VOTED_AT = "VOTED_AT"
    BELONGS_TO_PERSONALITY = "BELONGS_TO_PERSONALITY"


@dataclass
class Node:
    label: str
    attrs: dict[str, Any] = field(default_factory=dict)


class AttributedGraph:
    """Undirected multi-typed graph; edges keep their (src, relation, dst) orientation."""

    def __init__(self):
        self.nodes: dict[str, Node] = {}
        self.edges: list[tuple[str, Relation, str]] = []
        self._adj: dict[str, set[str]] = {}
        self._edge_keys: set[tuple[str, str, Relation]] = set()

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.nodes

    def add_node(self, node_id: str, label: str, **attrs) -> None:
        if node_id in self.nodes:
            if self.nodes[node_id].label != label:
                raise ValidationError(f"node {node_id!r} already exists with label {self.nodes[node_id].label!r}")
            self.nodes[node_id].attrs.update(attrs)
            return
        self.nodes[node_id] = Node(label, dict(attrs))
        self._adj[node_id] = set()

    def add_edge(self, src: str, dst: str, relation: Relation) -> bool:
        """Add an edge; returns False when it already exists."""
        if src == dst:
            raise ValidationError(f"self-loop on {src!r}")
        for n in (src, dst):
            if n not in self.nodes:
                raise ValidationError(f"edge endpoint {n!r} is not a node")
        a, b = (src, dst) if src < dst else (dst, src)
        key = (a, b, relation)
        if key in self._edge_keys:
            return False
        self._edge_keys.add(key)
        self.edges.append((src, relation, dst))
        self._adj[src].add(dst)
        self._adj[dst].add(src)
        return True

    def neighbors(self, node_id: str) -> list[str]:
        return sorted(self._adj[node_id])

    @property
    def adjacency(self) -> dict[str, list[str]]:
        return {n: sorted(nb) for n, nb in self._adj.items()}

    def degree(self, node_id: str) -> int:
        return len(self._adj[node_id])

    def nodes_with_label(self, label: str) -> list[str]:
        return sorted(n for n, node in self.nodes.items() if node.label == label)

    def canonical_edges(self) -> list[tuple[str, Relation, str]]:
        return sorted(self.edges, key=lambda e: (e[0], e[1].value, e[2]))

    def census(self) -> Counter:
        """Count of nodes per label."""
        return Counter(node.label for node in self.nodes.values())

    def copy(self) -> "AttributedGraph":
        return copy.deepcopy(self)

    def to_csr(self) -> tuple[list[str], np.ndarray, np.ndarray]:
        """(sorted node ids, indptr, indices) with neighbours sorted by id."""
        order = sorted(self.nodes)
        pos = {n: i for i, n in enumerate(order)}
        indptr = np.zeros(len(order) + 1, dtype=np.int64)
        indices: list[int] = []
        for i, n in enumerate(order):
            nb = sorted(pos[m] for m in self._adj[n])
            indices.extend(nb)
            indptr[i + 1] = len(indices)
        return order, indptr, np.asarray(indices, dtype=np.int64)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[str, Relation, str]], labels: dict[str, str] | None = None):
        g = cls()
        labels = labels or {}
        for src, rel, dst in edges:
            for n in (src, dst):
                if n not in g.nodes:
                    g.add_node(n, labels.get(n, ""))
            g.add_edge(src, dst, Relation(rel))
        return g
