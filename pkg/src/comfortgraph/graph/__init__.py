"""Cell discretisation, attributed graph assembly, HNSW index and feedback linking."""

from .build import build_graph
from .cells import Cell, EmptySpace, discretize
from .knn import KnnIndex, exact_knn, knn_build, knn_query, knn_query_many
from .linking import CellLocator, LocatedEvent, link_feedback
from .model import AttributedGraph, Node, Relation

__all__ = [
    "build_graph", "Cell", "EmptySpace", "discretize", "KnnIndex", "exact_knn", "knn_build", "knn_query",
    "knn_query_many", "CellLocator", "LocatedEvent", "link_feedback", "AttributedGraph", "Node", "Relation",
]
