"""Skip-gram with negative sampling over walk corpora."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .._backend import kernels
from ..errors import EmptyCorpus, ValidationError
from .walks import WalkCorpus, derive_seeds

DIM = 20


@dataclass
class SkipGramConfig:
    dim: int = DIM
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    lr_start: float = 0.025
    lr_end: float = 0.0001
    seed: int = 0
    workers: int = 1


@dataclass
class EmbeddingMatrix:
    node_ids: list[str]
    vectors: np.ndarray
    params: SkipGramConfig = field(default_factory=SkipGramConfig)
    final_loss: float = float("nan")

    def __post_init__(self):
        self._pos = {n: i for i, n in enumerate(self.node_ids)}

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._pos

    def __getitem__(self, node_id: str) -> np.ndarray:
        return self.vectors[self._pos[node_id]]

    def rows(self, node_ids) -> np.ndarray:
        return self.vectors[[self._pos[n] for n in node_ids]]

    def write_tsv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for n, v in zip(self.node_ids, self.vectors):
                fh.write(n + "\t" + "\t".join(repr(float(x)) for x in v) + "\n")

    @classmethod
    def read_tsv(cls, path) -> "EmbeddingMatrix":
        ids, rows = [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                parts = line.rstrip("\n").split("\t")
                if len(parts) < 2:
                    raise ValidationError(f"{path}:{lineno}: expected node id and vector")
                ids.append(parts[0])
                rows.append([float(x) for x in parts[1:]])
        return cls(ids, np.asarray(rows, dtype=np.float64))


def sigmoid(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def pair_loss_and_grad(h: np.ndarray, positive: np.ndarray, negatives: np.ndarray):
    """Negative-sampling loss of one (centre, context) pair and its gradients.

    ``loss = -log s(h.u_pos) - sum_k log s(-h.u_k)``; returns
    (loss, d/dh, d/du_pos, d/du_neg with one row per negative).
    """
    h = np.asarray(h, dtype=float)
    u = np.asarray(positive, dtype=float)
    negs = np.atleast_2d(np.asarray(negatives, dtype=float))
    sp = sigmoid(float(h @ u))
    sn = np.array([sigmoid(float(h @ v)) for v in negs])
    loss = -math.log(sp) - float(np.sum(np.log1p(-sn)))
    grad_h = -(1.0 - sp) * u + (sn[:, None] * negs).sum(axis=0)
    return loss, grad_h, -(1.0 - sp) * h, sn[:, None] * h[None, :]


NEGATIVE_TABLE_SIZE = 1 << 16  # small enough to stay cache resident


def negative_table(corpus: WalkCorpus, power: float = 0.75, size: int = NEGATIVE_TABLE_SIZE) -> np.ndarray:
    """Lookup table for negative draws: node i fills a share of slots proportional to count_i**power.

    A draw is ``table[u % size]`` for a uniform 64-bit ``u``.
    """
    counts = np.bincount(corpus.array[corpus.array >= 0], minlength=len(corpus.nodes)).astype(np.float64)
    cum = np.cumsum(counts ** power)
    slots = (np.arange(size) + 0.5) * (cum[-1] / size)
    return np.minimum(np.searchsorted(cum, slots, side="right"), len(cum) - 1).astype(np.int32)


def init_vectors(n: int, dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.uniform(-0.5 / dim, 0.5 / dim, size=(n, dim))


def train_skipgram(corpus: WalkCorpus, dim: int = DIM, window: int = 5, negatives: int = 5, epochs: int = 5,
                   lr_start: float = 0.025, lr_end: float = 0.0001, seed: int = 0, workers: int = 1,
                   backend=None) -> EmbeddingMatrix:
    """Train input vectors by SGD over every (centre, context) pair in the walks.

    With ``workers == 1`` the result is a pure function of the inputs. More
    workers train disjoint slices of the corpus concurrently on shared weights,
    without locking and without a determinism guarantee.
    """
    cfg = SkipGramConfig(dim, window, negatives, epochs, lr_start, lr_end, seed, workers)
    if len(corpus) == 0 or not (corpus.array >= 0).any():
        raise EmptyCorpus("walk corpus is empty")
    syn0 = init_vectors(len(corpus.nodes), dim, seed)
    syn1 = np.zeros_like(syn0)
    if epochs == 0:
        return EmbeddingMatrix(list(corpus.nodes), syn0, cfg)
    table = negative_table(corpus)
    impl = backend or kernels
    walks = np.ascontiguousarray(corpus.array, dtype=np.int64)
    if workers <= 1 or impl.BACKEND == "python":
        loss = impl.sgns_train(walks, syn0, syn1, table, window, negatives, epochs, lr_start, lr_end,
                               int(derive_seeds(seed, 1, stream=7)[0]))
    else:
        # hogwild: shared syn0/syn1, no locks
        chunks = np.array_split(walks, workers)
        seeds = derive_seeds(seed, workers, stream=7)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            losses = list(pool.map(
                lambda a: impl.sgns_train(np.ascontiguousarray(a[0]), syn0, syn1, table, window, negatives,
                                          epochs, lr_start, lr_end, int(a[1])),
                zip(chunks, seeds)))
        loss = float(np.mean(losses))
    return EmbeddingMatrix(list(corpus.nodes), syn0, cfg, float(loss))


def config_dict(emb: EmbeddingMatrix) -> dict:
    return asdict(emb.params)
