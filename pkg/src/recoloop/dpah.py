"""DPAH generator: directed preferential attachment with homophily.

Generates scale-free bi-populated directed networks. Sources are drawn
from group-specific power-law activity distributions; targets are drawn
with probability proportional to homophily times (in-degree + 1). The +1
smoothing bootstraps the zero in-degree start and preserves the
asymptotic proportionality to in-degree.
"""

from __future__ import annotations

import dataclasses
import json
import os

import numpy as np

from .graph import DirectedGraph
from .rng import stream


class GenerationError(RuntimeError):
    """Requested density is unreachable under the homophily constraints."""


class SamplingError(RuntimeError):
    """No eligible target exists for the drawn source."""


@dataclasses.dataclass(frozen=True)
class DpahParams:
    n: int
    fm: float
    h_mm: float
    h_MM: float
    gamma_m: float = 2.5
    gamma_M: float = 2.5
    density: float = 0.03
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2, got %r" % self.n)
        if not 0.0 <= self.fm <= 1.0:
            raise ValueError("fm must be in [0,1], got %r" % self.fm)
        for name in ("h_mm", "h_MM"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError("%s must be in [0,1], got %r" % (name, v))
        for name in ("gamma_m", "gamma_M"):
            v = getattr(self, name)
            if v <= 1.0:
                raise ValueError("%s must be > 1, got %r" % (name, v))
        if not 0.0 < self.density < 1.0:
            raise ValueError("density must be in (0,1), got %r" % self.density)

    @property
    def target_edges(self) -> int:
        return int(round(self.density * self.n * (self.n - 1)))

    def homophily_matrix(self) -> np.ndarray:
        """2x2 matrix indexed [source group][target group], group 1 = minority.

        Cross-group entries are derived as 1 - in-group homophily.
        """
        h = np.empty((2, 2))
        h[1, 1] = self.h_mm
        h[1, 0] = 1.0 - self.h_mm
        h[0, 0] = self.h_MM
        h[0, 1] = 1.0 - self.h_MM
        return h

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclasses.dataclass
class ActivityTable:
    """Per-node positive activity weights driving source sampling."""

    weights: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.weights.size == 0:
            raise ValueError("activity table must be non-empty")
        if not np.all(self.weights > 0):
            raise ValueError("activity weights must be strictly positive")


def draw_activities(params: DpahParams, rng: np.random.Generator) -> ActivityTable:
    """Pareto activity weights with each group's exponent, capped at n.

    w = u^(-1/(gamma-1)) with u ~ Uniform(0,1) is Pareto with tail
    exponent gamma; the cap stops a single node from monopolizing draws.
    """
    u = rng.random(params.n)
    gamma = np.where(
        np.arange(params.n) < int(round(params.n * params.fm)),
        params.gamma_m,
        params.gamma_M,
    )
    w = u ** (-1.0 / (gamma - 1.0))
    return ActivityTable(np.minimum(w, float(params.n)))


def sample_source(table: ActivityTable, rng: np.random.Generator) -> int:
    """Draw a node with probability proportional to its activity weight."""
    cum = np.cumsum(table.weights)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))


def target_weights(g: DirectedGraph, source: int, h: np.ndarray) -> np.ndarray:
    """Unnormalized target weights h_ij * (k_j^in + 1) over eligible targets.

    Ineligible targets (the source itself and existing out-neighbors)
    get weight zero.
    """
    sg = int(g.is_minority[source])
    base = np.where(g.is_minority, h[sg, 1], h[sg, 0])
    w = base * (g.in_degrees() + 1.0)
    w[source] = 0.0
    nbrs = g.out_neighbors(source).as_array()
    if nbrs.size:
        w[nbrs] = 0.0
    return w


def sample_target(g: DirectedGraph, source: int, h: np.ndarray, rng: np.random.Generator) -> int:
    """Draw a target per P(j) = h_ij (k_j^in + 1) / sum over eligible l."""
    w = target_weights(g, source, h)
    total = w.sum()
    if total <= 0.0:
        raise SamplingError("no eligible target for source %d" % source)
    cum = np.cumsum(w)
    return int(np.searchsorted(cum, rng.random() * total, side="right"))


def _capacity(params: DpahParams) -> tuple[int, dict[str, int]]:
    """Max number of simple edges respecting zero-homophily blocks."""
    n_min = int(round(params.n * params.fm))
    n_maj = params.n - n_min
    sizes = {1: n_min, 0: n_maj}
    h = params.homophily_matrix()
    blocks = {}
    total = 0
    for sg, sg_name in ((1, "m"), (0, "M")):
        for tg, tg_name in ((1, "m"), (0, "M")):
            if h[sg, tg] <= 0.0:
                cap = 0
            elif sg == tg:
                cap = sizes[sg] * (sizes[sg] - 1)
            else:
                cap = sizes[sg] * sizes[tg]
            blocks["%s->%s" % (sg_name, tg_name)] = cap
            total += cap
    return total, blocks


def generate(params: DpahParams) -> DirectedGraph:
    """Generate a DPAH graph with exactly round(d*n*(n-1)) edges.

    Raises GenerationError when the homophily structure caps the number
    of achievable edges below the target (the generator never silently
    under-fills).
    """
    e_star = params.target_edges
    capacity, blocks = _capacity(params)
    if e_star > capacity:
        raise GenerationError(
            "target edge count %d exceeds capacity %d under homophily "
            "constraints (block capacities: %s)"
            % (e_star, capacity, ", ".join("%s=%d" % kv for kv in sorted(blocks.items())))
        )

    rng = stream(params.seed, "dpah")
    g = DirectedGraph(params.n, params.fm)
    h = params.homophily_matrix()
    table = draw_activities(params, rng)

    # sources with no remaining eligible target are retired from sampling
    active = table.weights.copy()
    while g.num_edges < e_star:
        if not np.any(active > 0):
            raise GenerationError(
                "all sources saturated at %d/%d edges (capacity check "
                "passed but per-source eligibility is exhausted)"
                % (g.num_edges, e_star)
            )
        src = _sample_active(active, rng)
        try:
            tgt = sample_target(g, src, h, rng)
        except SamplingError:
            active[src] = 0.0
            continue
        g.add_edge(src, tgt)
    return g


def _sample_active(weights: np.ndarray, rng: np.random.Generator) -> int:
    cum = np.cumsum(weights)
    return int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))


def save_graph(g: DirectedGraph, path: str | os.PathLike, params: DpahParams | None = None) -> None:
    """Write the edge list plus a JSON sidecar of the exact parameters used."""
    g.write_edgelist(path)
    if params is not None:
        with open(str(path) + ".params.json", "w") as fh:
            json.dump(params.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
