"""Walk corpora, skip-gram node embeddings, similarity maps and clustering."""

from .cluster import cluster_cells, kmeans
from .similarity import (cosine_similarity, similarity_geojson, similarity_map, similarity_matrix,
                         write_geojson, write_similarity_csv)
from .skipgram import EmbeddingMatrix, SkipGramConfig, pair_loss_and_grad, train_skipgram
from .walks import WalkConfig, WalkCorpus, random_walks

__all__ = [
    "cluster_cells", "kmeans", "cosine_similarity", "similarity_geojson", "similarity_map", "similarity_matrix",
    "write_geojson", "write_similarity_csv", "EmbeddingMatrix", "SkipGramConfig", "pair_loss_and_grad",
    "train_skipgram", "WalkConfig", "WalkCorpus", "random_walks",
]
