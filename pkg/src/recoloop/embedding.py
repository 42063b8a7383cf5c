"""Directed node2vec pipeline: biased random walks + skip-gram negative sampling.

Walks follow out-edges only and truncate at sinks (no restart, which
would add teleportation the model does not define). Training is
single-threaded sequential SGD so that a fixed seed reproduces the
embedding matrix bit for bit; the hot loops are numba-compiled.
"""

from __future__ import annotations

import dataclasses
import struct

import numpy as np
from numba import njit

from .graph import DirectedGraph
from .rng import int_seed, stream


@dataclasses.dataclass(frozen=True)
class N2VParams:
    dimensions: int = 64
    walk_length: int = 10
    num_walks: int = 200
    window: int = 10
    negative_samples: int = 5
    epochs: int = 1
    learning_rate: float = 0.025
    p: float = 1.0
    q: float = 1.0

    def __post_init__(self):
        if min(self.dimensions, self.walk_length, self.num_walks, self.window) < 1:
            raise ValueError("dimensions, walk_length, num_walks and window must be >= 1")
        if self.negative_samples < 0 or self.epochs < 0:
            raise ValueError("negative_samples and epochs must be >= 0")
        if self.p <= 0 or self.q <= 0:
            raise ValueError("p and q must be > 0")


@dataclasses.dataclass
class WalkCorpus:
    """Fixed-width walk matrix; rows padded with -1 beyond their length."""

    walks: np.ndarray  # (num_walks_total, walk_length) int32
    lengths: np.ndarray  # (num_walks_total,) int32
    n_nodes: int


@dataclasses.dataclass
class EmbeddingMatrix:
    vectors: np.ndarray  # (n, dimensions)

    def dump(self, path) -> None:
        """Row-major binary dump: int64 n, int64 dimensions, float64 data."""
        v = np.ascontiguousarray(self.vectors, dtype=np.float64)
        with open(path, "wb") as fh:
            fh.write(struct.pack("<qq", v.shape[0], v.shape[1]))
            fh.write(v.tobytes())

    @classmethod
    def load(cls, path) -> "EmbeddingMatrix":
        with open(path, "rb") as fh:
            n, d = struct.unpack("<qq", fh.read(16))
            data = np.frombuffer(fh.read(), dtype=np.float64).reshape(n, d)
        return cls(data.copy())


@njit(cache=True)
def _has_edge(indptr, indices, i, j):
    lo = indptr[i]
    hi = indptr[i + 1]
    while lo < hi:
        mid = (lo + hi) // 2
        v = indices[mid]
        if v == j:
            return True
        if v < j:
            lo = mid + 1
        else:
            hi = mid
    return False


@njit(cache=True)
def _walk_kernel(indptr, indices, starts, walk_length, p, q, seed, walks, lengths):
    np.random.seed(seed)
    uniform = p == 1.0 and q == 1.0
    for w in range(starts.shape[0]):
        cur = starts[w]
        walks[w, 0] = cur
        length = 1
        prev = -1
        for _ in range(walk_length - 1):
            lo = indptr[cur]
            hi = indptr[cur + 1]
            deg = hi - lo
            if deg == 0:
                break
            if uniform or prev < 0:
                nxt = indices[lo + np.random.randint(deg)]
            else:
                total = 0.0
                for k in range(lo, hi):
                    x = indices[k]
                    if x == prev:
                        total += 1.0 / p
                    elif _has_edge(indptr, indices, prev, x):
                        total += 1.0
                    else:
                        total += 1.0 / q
                r = np.random.random() * total
                acc = 0.0
                nxt = indices[hi - 1]
                for k in range(lo, hi):
                    x = indices[k]
                    if x == prev:
                        acc += 1.0 / p
                    elif _has_edge(indptr, indices, prev, x):
                        acc += 1.0
                    else:
                        acc += 1.0 / q
                    if r < acc:
                        nxt = x
                        break
            walks[w, length] = nxt
            length += 1
            prev = cur
            cur = nxt
        lengths[w] = length


def generate_walks(g: DirectedGraph, params: N2VParams, seed: int) -> WalkCorpus:
    """num_walks walks from every node, following out-edges with p/q biasing."""
    a = g.adjacency()
    indptr = a.indptr.astype(np.int64)
    indices = a.indices.astype(np.int64)
    starts = np.repeat(np.arange(g.n, dtype=np.int64), params.num_walks)
    walks = np.full((starts.size, params.walk_length), -1, dtype=np.int32)
    lengths = np.zeros(starts.size, dtype=np.int32)
    _walk_kernel(
        indptr, indices, starts, params.walk_length,
        float(params.p), float(params.q),
        int_seed(seed, "walks") & 0x7FFFFFFF,
        walks, lengths,
    )
    return WalkCorpus(walks=walks, lengths=lengths, n_nodes=g.n)


def corpus_frequencies(corpus: WalkCorpus) -> np.ndarray:
    tokens = corpus.walks[corpus.walks >= 0]
    return np.bincount(tokens, minlength=corpus.n_nodes).astype(np.float64)


def negative_table(corpus: WalkCorpus) -> np.ndarray:
    """Cumulative probabilities of the unigram^(3/4) negative distribution."""
    freq = corpus_frequencies(corpus) ** 0.75
    total = freq.sum()
    if total == 0:
        freq = np.ones(corpus.n_nodes)
        total = freq.sum()
    return np.cumsum(freq / total)


@njit(cache=True, fastmath=True)
def _sigmoid(x):
    if x > 6.0:
        return 1.0
    if x < -6.0:
        return 0.0
    return 1.0 / (1.0 + np.exp(-x))


@njit(cache=True, fastmath=True)
def _sgns_epoch(walks, lengths, w_in, w_out, window, n_neg, neg_cum,
                lr_start, lr_end, seed, processed_start, total_centers):
    np.random.seed(seed)
    d = w_in.shape[1]
    neu1e = np.zeros(d, dtype=np.float32)
    processed = processed_start
    for w in range(walks.shape[0]):
        length = lengths[w]
        for pos in range(length):
            center = walks[w, pos]
            frac = processed / total_centers
            lr = np.float32(lr_start + (lr_end - lr_start) * frac)
            lo = pos - window
            if lo < 0:
                lo = 0
            hi = pos + window + 1
            if hi > length:
                hi = length
            for cpos in range(lo, hi):
                if cpos == pos:
                    continue
                ctx = walks[w, cpos]
                for k in range(d):
                    neu1e[k] = 0.0
                for s in range(n_neg + 1):
                    if s == 0:
                        target = ctx
                        label = np.float32(1.0)
                    else:
                        r = np.random.random()
                        t_lo = 0
                        t_hi = neg_cum.shape[0] - 1
                        while t_lo < t_hi:
                            mid = (t_lo + t_hi) // 2
                            if neg_cum[mid] <= r:
                                t_lo = mid + 1
                            else:
                                t_hi = mid
                        target = t_lo
                        if target == ctx:
                            continue
                        label = np.float32(0.0)
                    f = np.float32(0.0)
                    for k in range(d):
                        f += w_in[center, k] * w_out[target, k]
                    grad = (label - np.float32(_sigmoid(f))) * lr
                    for k in range(d):
                        neu1e[k] += grad * w_out[target, k]
                    for k in range(d):
                        w_out[target, k] += grad * w_in[center, k]
                for k in range(d):
                    w_in[center, k] += neu1e[k]
            processed += 1
    return processed


def initial_embeddings(n: int, params: N2VParams, seed: int) -> tuple[np.ndarray, np.ndarray]:
    rng = stream(seed, "init")
    w_in = ((rng.random((n, params.dimensions)) - 0.5) / params.dimensions).astype(np.float32)
    w_out = np.zeros((n, params.dimensions), dtype=np.float32)
    return w_in, w_out


def train_skipgram(corpus: WalkCorpus, params: N2VParams, seed: int,
                   epoch_callback=None) -> EmbeddingMatrix:
    """Train input embeddings on the walk corpus.

    Learning rate decays linearly from learning_rate to 1e-4 of it over
    all centers of all epochs. Zero epochs returns the initialization.
    epoch_callback(epoch, w_in, w_out), when given, runs after each epoch.
    """
    w_in, w_out = initial_embeddings(corpus.n_nodes, params, seed)
    if params.epochs > 0:
        neg_cum = negative_table(corpus)
        total_centers = max(1, int(corpus.lengths.sum()) * params.epochs)
        lr0 = params.learning_rate
        lr_final = lr0 * 1e-4
        processed = 0
        for epoch in range(params.epochs):
            processed = _sgns_epoch(
                corpus.walks, corpus.lengths, w_in, w_out,
                params.window, params.negative_samples, neg_cum,
                lr0, lr_final,
                int_seed(seed, "sgns", epoch) & 0x7FFFFFFF,
                processed, total_centers,
            )
            if epoch_callback is not None:
                epoch_callback(epoch, w_in, w_out)
    return EmbeddingMatrix(vectors=w_in)


def embed_graph(g: DirectedGraph, params: N2VParams, seed: int) -> EmbeddingMatrix:
    """Full pipeline: walks then skip-gram, reproducible from the seed."""
    corpus = generate_walks(g, params, seed)
    return train_skipgram(corpus, params, seed)


def corpus_pairs(corpus: WalkCorpus, window: int) -> tuple[np.ndarray, np.ndarray]:
    """All (center, context) pairs seen by training, in processing order."""
    centers = []
    contexts = []
    for w in range(corpus.walks.shape[0]):
        length = int(corpus.lengths[w])
        row = corpus.walks[w]
        for pos in range(length):
            lo = max(0, pos - window)
            hi = min(length, pos + window + 1)
            for cpos in range(lo, hi):
                if cpos != pos:
                    centers.append(row[pos])
                    contexts.append(row[cpos])
    return np.asarray(centers, dtype=np.int64), np.asarray(contexts, dtype=np.int64)


def negative_sampling_loss(
    w_in: np.ndarray,
    w_out: np.ndarray,
    centers: np.ndarray,
    contexts: np.ndarray,
    negatives: np.ndarray,
) -> float:
    """Mean SGNS objective over fixed pairs and fixed negative draws."""

    def log_sigmoid(x):
        return -np.logaddexp(0.0, -x)

    vin = w_in[centers].astype(np.float64)
    pos = np.einsum("ij,ij->i", vin, w_out[contexts].astype(np.float64))
    loss = -log_sigmoid(pos)
    for col in range(negatives.shape[1]):
        neg = np.einsum("ij,ij->i", vin, w_out[negatives[:, col]].astype(np.float64))
        loss -= log_sigmoid(-neg)
    return float(np.mean(loss))


def cosine_similarities(emb: EmbeddingMatrix) -> np.ndarray:
    """Dense pairwise cosine matrix; zero-norm rows give zero similarity."""
    v = emb.vectors.astype(np.float64)
    norms = np.linalg.norm(v, axis=1)
    safe = np.where(norms > 0, norms, 1.0)
    u = v / safe[:, None]
    sims = u @ u.T
    sims[norms == 0, :] = 0.0
    sims[:, norms == 0] = 0.0
    return sims
