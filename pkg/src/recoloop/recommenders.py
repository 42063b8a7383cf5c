"""The five topology-only link recommenders plus top-k selection.

All scoring functions are class-agnostic: they never read group labels,
so relabeling groups leaves every score vector unchanged. A candidate is
any node other than the seed that the seed does not already point to.
Zero-score candidates are never recommended: a node whose candidates all
score zero gets no recommendation that step (recommending on zero
evidence would inject noise the algorithms do not describe).
"""

from __future__ import annotations

import dataclasses
import warnings

import numpy as np
from scipy import sparse

from .embedding import EmbeddingMatrix, N2VParams, cosine_similarities, embed_graph
from .graph import DirectedGraph

PPR_TOL = 1e-10
PPR_MAX_ITER = 1000
SALSA_TOL = 1e-10
SALSA_MAX_ITER = 10000

RECOMMENDER_NAMES = ("ppr", "wtf", "2h", "cf", "n2v")


@dataclasses.dataclass
class ScoreVector:
    """Non-negative relevance scores over the seed's candidate set."""

    seed: int
    nodes: np.ndarray  # candidate node ids
    scores: np.ndarray  # aligned with nodes

    @classmethod
    def empty(cls, seed: int) -> "ScoreVector":
        return cls(seed, np.empty(0, dtype=np.int64), np.empty(0, dtype=np.float64))

    def __len__(self) -> int:
        return len(self.nodes)


@dataclasses.dataclass(frozen=True)
class Recommender:
    """A recommender kind plus its hyper-parameters.

    kind is one of 'ppr', 'wtf', '2h', 'cf', 'n2v' (or 'null', a stub
    that recommends nothing, used for invariant tests).
    """

    kind: str
    alpha: float = 0.85
    cot_size: int = 10
    n2v: N2VParams = dataclasses.field(default_factory=N2VParams)

    def __post_init__(self):
        if self.kind not in RECOMMENDER_NAMES + ("null",):
            raise ValueError(
                "unknown recommender %r; valid names: %s" % (self.kind, ", ".join(RECOMMENDER_NAMES))
            )
        if not 0.0 < self.alpha < 1.0:
            raise ValueError("alpha must be in (0,1), got %r" % self.alpha)
        if self.cot_size < 1:
            raise ValueError("circle-of-trust size must be >= 1, got %r" % self.cot_size)


def candidate_nodes(g: DirectedGraph, seed: int) -> np.ndarray:
    """All nodes except the seed and its existing out-neighbors."""
    mask = np.ones(g.n, dtype=bool)
    mask[seed] = False
    nbrs = g.out_neighbors(seed).as_array()
    if nbrs.size:
        mask[nbrs] = False
    return np.flatnonzero(mask)


# -- personalized PageRank -------------------------------------------------


def _transition_parts(a: sparse.csr_array) -> tuple[sparse.csr_array, np.ndarray]:
    """(W0^T, dangling mask): row-normalized transition with zeroed dangling rows."""
    out_deg = np.asarray(a.sum(axis=1)).ravel()
    dangling = out_deg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, out_deg))
    w0_t = a.multiply(inv[:, None]).T.tocsr()
    return w0_t, dangling


def personalized_pagerank(
    g: DirectedGraph,
    seed: int,
    alpha: float = 0.85,
    tol: float = PPR_TOL,
    max_iter: int = PPR_MAX_ITER,
) -> np.ndarray:
    """Full PPR vector for one seed; dangling rows teleport back to the seed.

    Redirecting dangling mass to the seed (rather than uniformly) keeps
    the vector a proper personalized distribution.
    """
    w0_t, dangling = _transition_parts(g.adjacency())
    pi = np.zeros(g.n)
    pi[seed] = 1.0
    for _ in range(max_iter):
        new = alpha * (w0_t @ pi)
        new[seed] += alpha * pi[dangling].sum() + (1.0 - alpha)
        residual = np.abs(new - pi).sum()
        pi = new
        if residual < tol:
            return pi
    raise RuntimeError(
        "personalized PageRank did not converge: L1 residual %.3e after %d iterations"
        % (residual, max_iter)
    )


def batch_personalized_pagerank(
    a: sparse.csr_array,
    alpha: float = 0.85,
    tol: float = PPR_TOL,
    max_iter: int = PPR_MAX_ITER,
) -> np.ndarray:
    """PPR vectors for all seeds at once; row i is the vector for seed i."""
    n = a.shape[0]
    w0_t, dangling = _transition_parts(a)
    w0 = w0_t.T.tocsr()
    pi = np.eye(n)
    diag = np.arange(n)
    for _ in range(max_iter):
        new = alpha * (pi @ w0)
        new[diag, diag] += alpha * (pi[:, dangling].sum(axis=1)) + (1.0 - alpha)
        residual = np.abs(new - pi).sum(axis=1).max()
        pi = new
        if residual < tol:
            return pi
    raise RuntimeError(
        "batch personalized PageRank did not converge: max L1 residual %.3e after %d iterations"
        % (residual, max_iter)
    )


def ppr_scores(g: DirectedGraph, seed: int, alpha: float = 0.85, ppr: np.ndarray | None = None) -> ScoreVector:
    if ppr is None:
        ppr = personalized_pagerank(g, seed, alpha=alpha)
    cand = candidate_nodes(g, seed)
    return ScoreVector(seed, cand, ppr[cand].astype(np.float64))


# -- who-to-follow (circle of trust + SALSA) -------------------------------


def circle_of_trust(g: DirectedGraph, seed: int, cot_size: int, alpha: float = 0.85,
                    ppr: np.ndarray | None = None) -> np.ndarray:
    """Top cot_size nodes by PPR score, seed excluded, zero scores dropped."""
    if ppr is None:
        ppr = personalized_pagerank(g, seed, alpha=alpha)
    scores = ppr.copy()
    scores[seed] = 0.0
    positive = np.flatnonzero(scores > 0)
    if positive.size == 0:
        return positive
    order = np.lexsort((positive, -scores[positive]))
    return positive[order[:cot_size]]


def salsa_authority_scores(
    g: DirectedGraph,
    hubs: np.ndarray,
    tol: float = SALSA_TOL,
    max_iter: int = SALSA_MAX_ITER,
) -> tuple[np.ndarray, np.ndarray]:
    """Converged SALSA authority weights on the bipartite hub/authority graph.

    Hubs are the circle-of-trust members; authorities are every node a
    hub points to. The walk alternates authority -> hub -> authority via
    shared bipartite edges. Returns (authority node ids, weights).
    """
    hub_edges = []
    auth_edges = []
    for h_idx, h in enumerate(hubs):
        for a in g.out_neighbors(int(h)):
            hub_edges.append(h_idx)
            auth_edges.append(a)
    if not hub_edges:
        return np.empty(0, dtype=np.int64), np.empty(0)
    hub_e = np.asarray(hub_edges, dtype=np.int64)
    auth_nodes, auth_e = np.unique(np.asarray(auth_edges, dtype=np.int64), return_inverse=True)
    n_hub = len(hubs)
    n_auth = len(auth_nodes)
    hub_deg = np.bincount(hub_e, minlength=n_hub).astype(np.float64)
    auth_deg = np.bincount(auth_e, minlength=n_auth).astype(np.float64)
    weights = np.full(n_auth, 1.0 / n_auth)
    for _ in range(max_iter):
        hub_w = np.bincount(hub_e, weights=weights[auth_e] / auth_deg[auth_e], minlength=n_hub)
        new = np.bincount(auth_e, weights=hub_w[hub_e] / hub_deg[hub_e], minlength=n_auth)
        residual = np.abs(new - weights).sum()
        weights = new
        if residual < tol:
            return auth_nodes, weights
    raise RuntimeError("SALSA did not converge: L1 residual %.3e after %d iterations" % (residual, max_iter))


def wtf_scores(
    g: DirectedGraph,
    seed: int,
    cot_size: int = 10,
    alpha: float = 0.85,
    ppr: np.ndarray | None = None,
) -> ScoreVector:
    """SALSA authority weights over the candidate set.

    The seed and its existing out-neighbors are filtered after
    convergence. An empty circle of trust yields an empty vector.
    """
    cot = circle_of_trust(g, seed, cot_size, alpha=alpha, ppr=ppr)
    if cot.size == 0:
        return ScoreVector.empty(seed)
    auth_nodes, weights = salsa_authority_scores(g, cot)
    if auth_nodes.size == 0:
        return ScoreVector.empty(seed)
    full = np.zeros(g.n)
    full[auth_nodes] = weights
    cand = candidate_nodes(g, seed)
    return ScoreVector(seed, cand, full[cand])


# -- neighborhood-counting recommenders ------------------------------------


def two_hops_scores(g: DirectedGraph, seed: int, a: sparse.csr_array | None = None) -> ScoreVector:
    """score(j) = number of length-2 directed paths seed -> x -> j."""
    if a is None:
        a = g.adjacency()
    row = np.zeros(g.n)
    nbrs = g.out_neighbors(seed).as_array()
    if nbrs.size:
        row = np.asarray(a[nbrs, :].sum(axis=0)).ravel()
    cand = candidate_nodes(g, seed)
    return ScoreVector(seed, cand, row[cand])


def common_followed_scores(g: DirectedGraph, seed: int, a: sparse.csr_array | None = None) -> ScoreVector:
    """score(j) = size of the overlap of seed's and j's followed sets."""
    if a is None:
        a = g.adjacency()
    seed_row = np.zeros(g.n)
    nbrs = g.out_neighbors(seed).as_array()
    if nbrs.size:
        seed_row[nbrs] = 1.0
    scores = a @ seed_row
    cand = candidate_nodes(g, seed)
    return ScoreVector(seed, cand, scores[cand])


# -- node2vec --------------------------------------------------------------


def node2vec_scores(emb: EmbeddingMatrix, seed: int, candidates: np.ndarray) -> ScoreVector:
    """Cosine similarity to the seed, shifted by +1 so scores stay non-negative.

    The shift preserves ordering. Zero-norm rows cannot be scored and are
    dropped from the candidate set with a warning.
    """
    v = emb.vectors.astype(np.float64)
    norms = np.linalg.norm(v, axis=1)
    candidates = np.asarray(candidates, dtype=np.int64)
    zero = candidates[norms[candidates] == 0]
    if zero.size:
        warnings.warn("excluding %d zero-norm embedding rows from candidates" % zero.size)
        candidates = candidates[norms[candidates] > 0]
    if norms[seed] == 0 or candidates.size == 0:
        return ScoreVector.empty(seed)
    sims = (v[candidates] @ v[seed]) / (norms[candidates] * norms[seed])
    return ScoreVector(seed, candidates, sims + 1.0)


# -- selection -------------------------------------------------------------


def top_k(sv: ScoreVector, k: int, rng: np.random.Generator) -> list[int]:
    """k highest-scoring candidates, ties broken by uniform random permutation.

    Zero-score candidates are excluded entirely; fewer than k ids are
    returned when positive-score candidates are scarce.
    """
    if k < 1:
        raise ValueError("k must be >= 1, got %r" % k)
    positive = sv.scores > 0
    nodes = sv.nodes[positive]
    scores = sv.scores[positive]
    if nodes.size == 0:
        return []
    perm = rng.permutation(nodes.size)
    order = np.argsort(-scores[perm], kind="stable")
    return [int(x) for x in nodes[perm][order[:k]]]


# -- per-step precomputation shared across all seeds -----------------------


def precompute(g: DirectedGraph, rec: Recommender, embed_seed: int = 0) -> dict:
    """Whole-graph quantities computed once per simulation step."""
    if rec.kind == "null":
        return {}
    a = g.adjacency()
    if rec.kind in ("ppr", "wtf"):
        return {"a": a, "ppr_matrix": batch_personalized_pagerank(a, alpha=rec.alpha)}
    if rec.kind == "2h":
        return {"a": a, "s2": (a @ a).tocsr()}
    if rec.kind == "cf":
        return {"a": a, "cf": (a @ a.T).tocsr()}
    if rec.kind == "n2v":
        emb = embed_graph(g, rec.n2v, embed_seed)
        return {"a": a, "emb": emb, "sims": cosine_similarities(emb)}
    raise AssertionError(rec.kind)


def step_scores(g: DirectedGraph, rec: Recommender, seed: int, precomp: dict) -> ScoreVector:
    """ScoreVector for one seed, reusing the per-step precomputation."""
    if rec.kind == "null":
        return ScoreVector.empty(seed)
    if rec.kind == "ppr":
        return ppr_scores(g, seed, alpha=rec.alpha, ppr=precomp["ppr_matrix"][seed])
    if rec.kind == "wtf":
        return wtf_scores(g, seed, cot_size=rec.cot_size, alpha=rec.alpha,
                          ppr=precomp["ppr_matrix"][seed])
    if rec.kind == "2h":
        cand = candidate_nodes(g, seed)
        row = np.asarray(precomp["s2"][[seed], :].todense()).ravel()
        return ScoreVector(seed, cand, row[cand])
    if rec.kind == "cf":
        cand = candidate_nodes(g, seed)
        row = np.asarray(precomp["cf"][[seed], :].todense()).ravel()
        return ScoreVector(seed, cand, row[cand])
    if rec.kind == "n2v":
        cand = candidate_nodes(g, seed)
        emb = precomp["emb"]
        norms = np.linalg.norm(emb.vectors.astype(np.float64), axis=1)
        cand = cand[norms[cand] > 0]
        if norms[seed] == 0 or cand.size == 0:
            return ScoreVector.empty(seed)
        return ScoreVector(seed, cand, precomp["sims"][seed, cand] + 1.0)
    raise AssertionError(rec.kind)
