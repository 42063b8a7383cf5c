import numpy as np
import pytest

from recoloop.graph import DirectedGraph


def random_graph(n, p, seed, fm=0.0):
    """Erdos-Renyi style directed graph for oracle comparisons."""
    rng = np.random.default_rng(seed)
    g = DirectedGraph(n, fm)
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < p:
                g.add_edge(i, j)
    return g


def dense_transition(g, seed=None):
    """Dense row-stochastic transition matrix.

    Dangling rows go to `seed` when given (personalized variant), else
    uniformly over all nodes.
    """
    n = g.n
    w = np.zeros((n, n))
    for i in range(n):
        nbrs = sorted(g.out_neighbors(i))
        if nbrs:
            w[i, nbrs] = 1.0 / len(nbrs)
        elif seed is not None:
            w[i, seed] = 1.0
        else:
            w[i, :] = 1.0 / n
    return w


def dense_ppr(g, seed, alpha=0.85):
    """Direct linear solve of the personalized PageRank fixed point."""
    n = g.n
    w = dense_transition(g, seed=seed)
    e = np.zeros(n)
    e[seed] = 1.0
    return np.linalg.solve(np.eye(n) - alpha * w.T, (1 - alpha) * e)


def dense_pagerank(g, alpha=0.85):
    """Direct linear solve of global PageRank with uniform teleport."""
    n = g.n
    w = dense_transition(g)
    return np.linalg.solve(np.eye(n) - alpha * w.T, (1 - alpha) * np.ones(n) / n)


@pytest.fixture
def triangle_bidirected():
    g = DirectedGraph(3)
    for i in range(3):
        for j in range(3):
            if i != j:
                g.add_edge(i, j)
    return g


@pytest.fixture
def three_cycle():
    g = DirectedGraph(3)
    g.add_edge(0, 1)
    g.add_edge(1, 2)
    g.add_edge(2, 0)
    return g
