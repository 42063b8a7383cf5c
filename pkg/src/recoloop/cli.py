"""Command-line surface: generate, simulate, sweep, metrics, extract."""

from __future__ import annotations

import json
import os
import sys

import click

from . import SCHEMA_VERSION, __version__
from .dpah import DpahParams, GenerationError, generate as dpah_generate, save_graph
from .embedding import N2VParams
from .extract import FIGURE_KINDS, SchemaError, extract as extract_table, write_table
from .graph import DirectedGraph
from .harness import (
    SweepSpec,
    read_records,
    run_sweep,
    write_records,
)
from .metrics import metrics_snapshot
from .recommenders import RECOMMENDER_NAMES, Recommender
from .simulation import SimulationConfig, run as run_simulation

EXIT_USAGE = 1
EXIT_RUNTIME = 2


def _echo_config(out_dir: str, name: str, config: dict) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, name), "w") as fh:
        json.dump(config, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


@click.group()
@click.version_option(__version__, message="recoloop %(version)s (records schema " + SCHEMA_VERSION + ")")
def cli():
    """Simulate link-recommendation feedback loops on synthetic networks."""


@cli.command()
@click.option("--n", type=int, default=1000, show_default=True, help="number of nodes")
@click.option("--fm", type=float, default=0.3, show_default=True, help="minority fraction")
@click.option("--hmm", type=float, default=0.5, show_default=True, help="minority in-group homophily")
@click.option("--hmm-maj", "hmm_maj", type=float, default=0.5, show_default=True,
              help="majority in-group homophily")
@click.option("--gamma", type=float, default=2.5, show_default=True, help="activity exponent (both groups)")
@click.option("--density", type=float, default=0.03, show_default=True, help="edge density")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), default="network.edges", show_default=True)
def generate(n, fm, hmm, hmm_maj, gamma, density, seed, out):
    """Generate a DPAH network and write its edge list plus params sidecar."""
    params = DpahParams(n=n, fm=fm, h_mm=hmm, h_MM=hmm_maj, gamma_m=gamma,
                        gamma_M=gamma, density=density, seed=seed)
    g = dpah_generate(params)
    save_graph(g, out, params)
    click.echo("wrote %s (%d nodes, %d edges)" % (out, g.n, g.num_edges))


@cli.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True,
              help="edge-list input network")
@click.option("--recommender", type=str, required=True,
              help="one of: %s" % ", ".join(RECOMMENDER_NAMES))
@click.option("--steps", type=int, default=30, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--alpha", type=float, default=0.85, show_default=True, help="PageRank damping")
@click.option("--cot-size", type=int, default=10, show_default=True, help="WTF circle-of-trust size")
@click.option("--out-dir", type=click.Path(), default="sim_out", show_default=True)
def simulate(graph_path, recommender, steps, seed, alpha, cot_size, out_dir):
    """Run one feedback-loop simulation; records include a step-0 baseline."""
    if recommender not in RECOMMENDER_NAMES:
        raise click.UsageError(
            "unknown recommender %r; valid names: %s" % (recommender, ", ".join(RECOMMENDER_NAMES))
        )
    g = DirectedGraph.read_edgelist(graph_path)
    rec = Recommender(kind=recommender, alpha=alpha, cot_size=cot_size, n2v=N2VParams())
    cfg = SimulationConfig(recommender=rec, steps=steps, seed=seed)
    records = run_simulation(g, cfg, alpha=alpha)

    params_sidecar = str(graph_path) + ".params.json"
    h_mm = h_MM = float("nan")
    if os.path.exists(params_sidecar):
        with open(params_sidecar) as fh:
            p = json.load(fh)
        h_mm, h_MM = p.get("h_mm", h_mm), p.get("h_MM", h_MM)
    n_min, _ = g.group_counts()
    baseline_vis = records[0].metrics.visibility_m
    rows = []
    for r in records:
        rows.append({
            "run_id": "simulate_%s_seed%d" % (recommender, seed),
            "recommender": recommender,
            "h_mm": h_mm,
            "h_MM": h_MM,
            "f_m": n_min / g.n,
            "replicate": 0,
            "seed": seed,
            "step": r.step,
            "gini_in": r.metrics.gini_in,
            "clustering": r.metrics.clustering,
            "visibility_m": r.metrics.visibility_m,
            "relative_visibility": r.metrics.relative_visibility,
            "delta_visibility_so_far": r.metrics.visibility_m - baseline_vis,
            "I_m": r.metrics.inlink_ratio_m,
            "I_M": r.metrics.inlink_ratio_M,
            "edges_added": r.edges_added,
            "edges_removed": r.edges_removed,
            "skipped_nodes": r.skipped_nodes,
        })
    os.makedirs(out_dir, exist_ok=True)
    records_path = os.path.join(out_dir, "records.csv")
    write_records(rows, records_path)
    _echo_config(out_dir, "config.json", {
        "command": "simulate", "graph": str(graph_path), "recommender": recommender,
        "steps": steps, "seed": seed, "alpha": alpha, "cot_size": cot_size,
    })
    click.echo("wrote %s (%d rows)" % (records_path, len(rows)))


@cli.command()
@click.option("--config", "config_path", type=click.Path(exists=True), required=True,
              help="YAML sweep spec (see README)")
@click.option("--out-dir", type=click.Path(), default="sweep_out", show_default=True)
@click.option("--workers", type=int, default=1, show_default=True)
def sweep(config_path, out_dir, workers):
    """Run an experiment sweep from a declarative config file."""
    spec = SweepSpec.from_config(config_path)
    records_path = run_sweep(spec, out_dir, workers=workers)
    click.echo("wrote %s" % records_path)


@cli.command()
@click.option("--graph", "graph_path", type=click.Path(exists=True), required=True)
@click.option("--alpha", type=float, default=0.85, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="optional JSON output path")
def metrics(graph_path, alpha, out):
    """Compute the metric snapshot of a stored network."""
    g = DirectedGraph.read_edgelist(graph_path)
    snap = metrics_snapshot(g, alpha=alpha)
    payload = {
        "clustering": snap.clustering,
        "gini_in": snap.gini_in,
        "visibility_m": snap.visibility_m,
        "relative_visibility": snap.relative_visibility,
        "I_m": snap.inlink_ratio_m,
        "I_M": snap.inlink_ratio_M,
        "n": g.n,
        "edges": g.num_edges,
    }
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


@cli.command()
@click.option("--records", "records_path", type=click.Path(exists=True), required=True)
@click.option("--figure", type=click.Choice(FIGURE_KINDS), required=True)
@click.option("--out", type=click.Path(), required=True)
def extract(records_path, figure, out):
    """Reshape records into the plot-ready table for one figure kind."""
    records = read_records(records_path)
    table = extract_table(records, figure)
    write_table(table, out)
    click.echo("wrote %s (%d rows)" % (out, len(table)))


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except (click.UsageError, ValueError, SchemaError) as exc:
        click.echo("error: %s" % exc, err=True)
        return EXIT_USAGE
    except (GenerationError, RuntimeError) as exc:
        click.echo("error: %s" % exc, err=True)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
