"""Evaluation metrics: directed clustering, in-degree Gini, minority visibility.

Degenerate-case conventions are fixed here because small test graphs hit
them even though realistic networks never do: all-zero degrees give
Gini 0, a zero clustering denominator gives a node coefficient of 0, and
a group with no outgoing edges has in-group ratio 0.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .graph import DirectedGraph


@dataclasses.dataclass(frozen=True)
class MetricsSnapshot:
    clustering: float
    gini_in: float
    visibility_m: float
    relative_visibility: float
    inlink_ratio_m: float
    inlink_ratio_M: float


def clustering_coefficient(g: DirectedGraph) -> float:
    """Global directed clustering: mean of Fagiolo per-node coefficients.

    t_i = ((A + A^T)^3)_ii / 2 directed triangles through node i,
    normalized by deg_tot*(deg_tot - 1) - 2*deg_recip. A fully
    bidirected clique scores exactly 1.
    """
    a = g.adjacency()
    s = (a + a.T).tocsr()
    s2 = s @ s
    # diag(S^3) via sum_j (S^2)_ij S_ij, S symmetric
    diag_s3 = np.asarray(s2.multiply(s).sum(axis=1)).ravel()
    triangles = 0.5 * diag_s3
    deg_tot = g.in_degrees() + g.out_degrees()
    deg_recip = np.asarray(a.multiply(a.T).sum(axis=1)).ravel()
    denom = deg_tot * (deg_tot - 1.0) - 2.0 * deg_recip
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.where(denom > 0, triangles / denom, 0.0)
    return float(np.mean(c))


def gini(values: np.ndarray) -> float:
    """Gini coefficient of a non-negative vector; 0 for all-zero input."""
    x = np.sort(np.asarray(values, dtype=np.float64))
    n = x.size
    total = x.sum()
    if n <= 1 or total == 0:
        return 0.0
    idx = np.arange(1, n + 1)
    return float(np.sum((2 * idx - n - 1) * x) / (n * total))


def gini_in_degree(g: DirectedGraph) -> float:
    return gini(g.in_degrees())


def pagerank(
    g: DirectedGraph,
    alpha: float = 0.85,
    tol: float = 1e-12,
    max_iter: int = 1000,
) -> np.ndarray:
    """Global PageRank with uniform teleport; dangling mass spread uniformly."""
    n = g.n
    a = g.adjacency()
    out_deg = g.out_degrees().astype(np.float64)
    dangling = out_deg == 0
    inv_deg = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, out_deg))
    # row-normalized transition, transposed once for fast left-multiplication
    w_t = (a.multiply(inv_deg[:, None])).T.tocsr()
    pi = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = alpha * (w_t @ pi)
        new += alpha * pi[dangling].sum() / n + (1.0 - alpha) / n
        residual = np.abs(new - pi).sum()
        pi = new
        if residual < tol:
            return pi
    raise RuntimeError("PageRank did not converge: L1 residual %.3e after %d iterations" % (residual, max_iter))


def top_rank_set(scores: np.ndarray, top_fraction: float) -> np.ndarray:
    """Indices of the top ceil(top_fraction*n) scores.

    Boundary ties are admitted by ascending node id until the quota is
    filled, which keeps the set deterministic.
    """
    n = scores.size
    quota = int(math.ceil(top_fraction * n))
    order = np.lexsort((np.arange(n), -scores))
    return order[:quota]


def visibility(
    g: DirectedGraph,
    alpha: float = 0.85,
    top_fraction: float = 0.10,
) -> tuple[float, float]:
    """(f_hat_m, f_hat_m - f_m): minority share of the PageRank top slice."""
    if not 0.0 < top_fraction <= 1.0:
        raise ValueError("top_fraction must be in (0,1], got %r" % top_fraction)
    pi = pagerank(g, alpha=alpha)
    top = top_rank_set(pi, top_fraction)
    f_hat = float(np.mean(g.is_minority[top]))
    n_min, _ = g.group_counts()
    return f_hat, f_hat - n_min / g.n


def delta_visibility(before: float, after: float) -> float:
    """Change in minority visibility: after minus before."""
    return after - before


def in_group_ratios(g: DirectedGraph) -> tuple[float, float]:
    """(I_m, I_M): fraction of each group's out-links staying in-group."""
    ea = g.edge_array()
    if len(ea) == 0:
        return 0.0, 0.0
    src_min = g.is_minority[ea[:, 0]]
    tgt_min = g.is_minority[ea[:, 1]]
    e_mm = int(np.sum(src_min & tgt_min))
    e_mM = int(np.sum(src_min & ~tgt_min))
    e_MM = int(np.sum(~src_min & ~tgt_min))
    e_Mm = int(np.sum(~src_min & tgt_min))
    i_m = e_mm / (e_mm + e_mM) if (e_mm + e_mM) > 0 else 0.0
    i_M = e_MM / (e_MM + e_Mm) if (e_MM + e_Mm) > 0 else 0.0
    return i_m, i_M


def metrics_snapshot(g: DirectedGraph, alpha: float = 0.85, top_fraction: float = 0.10) -> MetricsSnapshot:
    f_hat, rel = visibility(g, alpha=alpha, top_fraction=top_fraction)
    i_m, i_M = in_group_ratios(g)
    return MetricsSnapshot(
        clustering=clustering_coefficient(g),
        gini_in=gini_in_degree(g),
        visibility_m=f_hat,
        relative_visibility=rel,
        inlink_ratio_m=i_m,
        inlink_ratio_M=i_M,
    )
