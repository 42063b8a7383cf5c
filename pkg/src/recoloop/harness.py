"""Experiment sweeps over homophily grids and minority sizes.

A sweep cell is (h_mm, h_MM, f_m, replicate, recommender). All five
recommenders in one replicate start from the same generated network
(generation seeding ignores the recommender), so algorithm comparisons
share identical baselines. Seeds are content-addressed from the cell
coordinates, so any cell re-run in isolation reproduces its rows from
the full sweep and worker count cannot change the output.
"""

from __future__ import annotations

import dataclasses
import json
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd
import yaml

from . import SCHEMA_VERSION
from .dpah import DpahParams, GenerationError, generate
from .embedding import N2VParams
from .recommenders import Recommender
from .rng import int_seed
from .simulation import SimulationConfig, run

RECORD_COLUMNS = [
    "run_id",
    "recommender",
    "h_mm",
    "h_MM",
    "f_m",
    "replicate",
    "seed",
    "step",
    "gini_in",
    "clustering",
    "visibility_m",
    "relative_visibility",
    "delta_visibility_so_far",
    "I_m",
    "I_M",
    "edges_added",
    "edges_removed",
    "skipped_nodes",
]

FM_SWEEP_DEFAULT_CELLS = [(0.2, 0.2), (0.2, 0.8), (0.8, 0.2), (0.8, 0.8)]

_SCHEMA_LINE = "# recoloop-records schema=%s" % SCHEMA_VERSION


@dataclasses.dataclass(frozen=True)
class SweepSpec:
    cells: tuple[tuple[float, float], ...]  # (h_mm, h_MM) pairs
    fm_values: tuple[float, ...] = (0.3,)
    replicates: int = 4
    recommenders: tuple[str, ...] = ("ppr", "wtf", "2h", "cf", "n2v")
    base_seed: int = 0
    n: int = 1000
    density: float = 0.03
    gamma: float = 2.5
    steps: int = 30
    alpha: float = 0.85
    cot_size: int = 10
    n2v_dimensions: int = 64
    n2v_walk_length: int = 10
    n2v_num_walks: int = 200

    @classmethod
    def homophily_grid(cls, values, **kwargs) -> "SweepSpec":
        cells = tuple((float(hm), float(hM)) for hm in values for hM in values)
        return cls(cells=cells, **kwargs)

    @classmethod
    def from_config(cls, path) -> "SweepSpec":
        """Load a spec from a flat YAML mapping (see README for the schema)."""
        with open(path) as fh:
            raw = yaml.safe_load(fh) or {}
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known - {"homophily_values"}
        if unknown:
            raise ValueError("unknown sweep config keys: %s" % ", ".join(sorted(unknown)))
        if "homophily_values" in raw:
            if "cells" in raw:
                raise ValueError("give either 'cells' or 'homophily_values', not both")
            raw["cells"] = [(float(a), float(b))
                            for a in raw["homophily_values"] for b in raw["homophily_values"]]
            del raw["homophily_values"]
        if "cells" in raw:
            raw["cells"] = tuple((float(a), float(b)) for a, b in raw["cells"])
        for key in ("fm_values", "recommenders"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return cls(**raw)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["cells"] = [list(c) for c in self.cells]
        d["fm_values"] = list(self.fm_values)
        d["recommenders"] = list(self.recommenders)
        return d

    def jobs(self) -> list[dict]:
        out = []
        for h_mm, h_MM in self.cells:
            for fm in self.fm_values:
                for rep in range(self.replicates):
                    for rec in self.recommenders:
                        out.append(dict(h_mm=h_mm, h_MM=h_MM, fm=fm, replicate=rep, recommender=rec))
        return out


def _recommender(spec: SweepSpec, name: str) -> Recommender:
    return Recommender(
        kind=name,
        alpha=spec.alpha,
        cot_size=spec.cot_size,
        n2v=N2VParams(
            dimensions=spec.n2v_dimensions,
            walk_length=spec.n2v_walk_length,
            num_walks=spec.n2v_num_walks,
        ),
    )


def run_job(spec: SweepSpec, job: dict) -> list[dict]:
    """Generate the cell's network, run the simulation, emit tidy rows."""
    gen_seed = int_seed(spec.base_seed, "gen", job["h_mm"], job["h_MM"], job["fm"], job["replicate"])
    sim_seed = int_seed(spec.base_seed, "sim", job["h_mm"], job["h_MM"], job["fm"],
                        job["replicate"], job["recommender"])
    params = DpahParams(
        n=spec.n, fm=job["fm"], h_mm=job["h_mm"], h_MM=job["h_MM"],
        gamma_m=spec.gamma, gamma_M=spec.gamma, density=spec.density, seed=gen_seed,
    )
    g = generate(params)
    cfg = SimulationConfig(
        recommender=_recommender(spec, job["recommender"]),
        steps=spec.steps,
        seed=sim_seed,
    )
    records = run(g, cfg, alpha=spec.alpha)
    run_id = "%s_h%g-%g_fm%g_r%d" % (job["recommender"], job["h_mm"], job["h_MM"],
                                     job["fm"], job["replicate"])
    baseline_vis = records[0].metrics.visibility_m
    rows = []
    for rec in records:
        rows.append({
            "run_id": run_id,
            "recommender": job["recommender"],
            "h_mm": job["h_mm"],
            "h_MM": job["h_MM"],
            "f_m": job["fm"],
            "replicate": job["replicate"],
            "seed": sim_seed,
            "step": rec.step,
            "gini_in": rec.metrics.gini_in,
            "clustering": rec.metrics.clustering,
            "visibility_m": rec.metrics.visibility_m,
            "relative_visibility": rec.metrics.relative_visibility,
            "delta_visibility_so_far": rec.metrics.visibility_m - baseline_vis,
            "I_m": rec.metrics.inlink_ratio_m,
            "I_M": rec.metrics.inlink_ratio_M,
            "edges_added": rec.edges_added,
            "edges_removed": rec.edges_removed,
            "skipped_nodes": rec.skipped_nodes,
        })
    return rows


def _run_job_entry(args):
    spec, job = args
    try:
        return job, run_job(spec, job), None
    except GenerationError as exc:
        return job, [], str(exc)


def _format_value(v) -> str:
    if isinstance(v, float):
        return "%.12g" % v
    return str(v)


def write_records(rows: list[dict], path) -> None:
    with open(path, "w") as fh:
        fh.write(_SCHEMA_LINE + "\n")
        fh.write(",".join(RECORD_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join(_format_value(row[c]) for c in RECORD_COLUMNS) + "\n")


def read_records(path) -> pd.DataFrame:
    """Read a records file, checking the schema line."""
    with open(path) as fh:
        first = fh.readline().strip()
    if first != _SCHEMA_LINE:
        raise ValueError(
            "unrecognized records schema in %s: %r (expected %r)" % (path, first, _SCHEMA_LINE)
        )
    return pd.read_csv(path, comment="#", header=0, names=RECORD_COLUMNS, skiprows=1)


def run_sweep(spec: SweepSpec, out_dir, workers: int = 1) -> str:
    """Run all sweep cells and persist records + manifest + config echo.

    Returns the records file path. Unreachable-density cells appear in
    the manifest with their failure reason rather than being silently
    dropped.
    """
    os.makedirs(out_dir, exist_ok=True)
    jobs = spec.jobs()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_job_entry, [(spec, j) for j in jobs]))
    else:
        results = [_run_job_entry((spec, j)) for j in jobs]

    rows = []
    failed = []
    for job, job_rows, error in results:
        if error is not None:
            failed.append({**job, "error": error})
        rows.extend(job_rows)
    rows.sort(key=lambda r: (r["recommender"], r["h_mm"], r["h_MM"], r["f_m"],
                             r["replicate"], r["step"]))

    records_path = os.path.join(out_dir, "records.csv")
    write_records(rows, records_path)
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump({"schema": SCHEMA_VERSION, "jobs": len(jobs),
                   "completed": len(jobs) - len(failed), "failed_cells": failed},
                  fh, indent=2)
        fh.write("\n")
    with open(os.path.join(out_dir, "config.yaml"), "w") as fh:
        yaml.safe_dump(spec.to_dict(), fh, sort_keys=True)
    return records_path


def summarize(records: pd.DataFrame, expected_cells=None) -> tuple[pd.DataFrame, list[dict]]:
    """Per-cell aggregates over replicates.

    Returns (aggregates, gaps): mean and std of the final-step change in
    visibility, Gini and clustering for each (recommender, h_mm, h_MM,
    f_m). Cells listed in expected_cells but absent from the records are
    reported in gaps.
    """
    keys = ["recommender", "h_mm", "h_MM", "f_m"]
    final = records.loc[records.groupby(keys + ["replicate"])["step"].idxmax()]
    initial = records.loc[records.groupby(keys + ["replicate"])["step"].idxmin()]
    merged = final.merge(initial, on=keys + ["replicate"], suffixes=("_final", "_initial"))
    merged["delta_fm"] = merged["delta_visibility_so_far_final"]
    merged["gini_change"] = merged["gini_in_final"] - merged["gini_in_initial"]
    merged["clustering_change"] = merged["clustering_final"] - merged["clustering_initial"]
    agg = (
        merged.groupby(keys)[["delta_fm", "gini_change", "clustering_change"]]
        .agg(["mean", "std"])
    )
    agg.columns = ["%s_%s" % (a, b) for a, b in agg.columns]
    agg = agg.fillna(0.0).reset_index()

    gaps = []
    if expected_cells is not None:
        present = {tuple(t) for t in agg[keys].itertuples(index=False)}
        for cell in expected_cells:
            if tuple(cell) not in present:
                gaps.append(dict(zip(keys, cell)))
    return agg, gaps
