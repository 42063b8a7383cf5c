"""The recommendation feedback loop.

Each step: compute top-1 recommendations for every node against the
frozen pre-step graph, apply the accepted links, and for every addition
remove one random out-link of the same source so the edge count never
changes. Acceptance is always 100% (top-1 auto-accepted).

Determinism: tie-breaking uses a per-(run seed, step, node) stream and
removals use a per-(run seed, step) stream consumed in ascending node
order, so recomputing any step reproduces it exactly.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .graph import DirectedGraph
from .metrics import MetricsSnapshot, metrics_snapshot
from .recommenders import Recommender, precompute, step_scores, top_k
from .rng import int_seed, stream


@dataclasses.dataclass(frozen=True)
class SimulationConfig:
    recommender: Recommender
    steps: int = 30
    k: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0, got %r" % self.steps)
        if self.k != 1:
            raise ValueError("only k=1 is supported in the main loop, got %r" % self.k)


@dataclasses.dataclass(frozen=True)
class StepRecord:
    step: int
    edges_added: int
    edges_removed: int
    skipped_nodes: int
    fallback_removals: int
    metrics: MetricsSnapshot


def _compute_top1(g: DirectedGraph, rec: Recommender, run_seed: int, step_index: int) -> dict[int, int]:
    """Top-1 pick per node against the frozen snapshot; skipped nodes absent."""
    precomp = precompute(g, rec, embed_seed=int_seed(run_seed, "n2v", step_index))
    picks: dict[int, int] = {}
    for node in range(g.n):
        sv = step_scores(g, rec, node, precomp)
        if len(sv) == 0:
            continue
        chosen = top_k(sv, 1, stream(run_seed, "tie", step_index, node))
        if chosen:
            picks[node] = chosen[0]
    return picks


def step(g: DirectedGraph, rec: Recommender, step_index: int, run_seed: int,
         alpha: float = 0.85, with_metrics: bool = True) -> StepRecord:
    """One recommendation round, mutating g in place at constant edge count."""
    snapshot = g.copy()
    picks = _compute_top1(snapshot, rec, run_seed, step_index)
    skipped = g.n - len(picks)

    removal_rng = stream(run_seed, "removal", step_index)
    added_codes: set[int] = set()
    added = removed = fallbacks = 0
    for source in sorted(picks):
        target = picks[source]
        if not g.add_edge(source, target):
            # duplicate pre-existing edge: no-op, no removal charged
            continue
        added += 1
        added_codes.add(source * g.n + target)
        # removal budget is per node: drop one of the source's other out-links
        own = [j for j in g.out_neighbors(source)
               if (source * g.n + j) not in added_codes]
        if own:
            victim = own[int(removal_rng.integers(len(own)))]
            g.remove_edge(source, victim)
            removed += 1
        else:
            # source had no other out-link; keep density exact by removing
            # a random edge elsewhere (never one added this step)
            fallbacks += 1
            done = False
            for _ in range(10 * g.num_edges):
                i, j = g.random_edge(removal_rng)
                if (i * g.n + j) not in added_codes:
                    g.remove_edge(i, j)
                    removed += 1
                    done = True
                    break
            if not done:
                # tiny-graph corner: every edge left was added this step.
                # Keep density exact anyway, sparing only the newest edge.
                while True:
                    i, j = g.random_edge(removal_rng)
                    if i * g.n + j != source * g.n + target:
                        g.remove_edge(i, j)
                        removed += 1
                        break

    metrics = metrics_snapshot(g, alpha=alpha) if with_metrics else None
    return StepRecord(
        step=step_index,
        edges_added=added,
        edges_removed=removed,
        skipped_nodes=skipped,
        fallback_removals=fallbacks,
        metrics=metrics,
    )


def run(g: DirectedGraph, cfg: SimulationConfig, alpha: float = 0.85) -> list[StepRecord]:
    """Run cfg.steps rounds on g (mutated in place).

    The returned list starts with a step-0 baseline record taken before
    any recommendation.
    """
    records = [
        StepRecord(
            step=0,
            edges_added=0,
            edges_removed=0,
            skipped_nodes=0,
            fallback_removals=0,
            metrics=metrics_snapshot(g, alpha=alpha),
        )
    ]
    for t in range(1, cfg.steps + 1):
        records.append(step(g, cfg.recommender, t, cfg.seed, alpha=alpha))
    return records
