import numpy as np
import pytest

SCHEMA_LINE = "# recoloop-records schema=1"

COLUMNS = [
    "run_id", "recommender", "h_mm", "h_MM", "f_m", "replicate", "seed",
    "step", "gini_in", "clustering", "visibility_m", "relative_visibility",
    "delta_visibility_so_far", "I_m", "I_M",
    "edges_added", "edges_removed", "skipped_nodes",
]


def make_records(path, recommenders=("ppr", "cf"), cells=((0.2, 0.8), (0.8, 0.2)),
                 fm_values=(0.3,), replicates=2, steps=(0, 30), delta_fn=None):
    """Write a synthetic records file in the harness's delimited format."""
    if delta_fn is None:
        delta_fn = lambda h_mm, h_MM: 0.01 * (h_mm - h_MM)
    lines = [SCHEMA_LINE, ",".join(COLUMNS)]
    for rec in recommenders:
        for h_mm, h_MM in cells:
            for fm in fm_values:
                for rep in range(replicates):
                    for step in steps:
                        progress = step / max(steps)
                        row = {
                            "run_id": "synthetic", "recommender": rec,
                            "h_mm": h_mm, "h_MM": h_MM, "f_m": fm,
                            "replicate": rep, "seed": 1, "step": step,
                            "gini_in": 0.5 + 0.1 * progress,
                            "clustering": 0.05 + 0.02 * progress,
                            "visibility_m": fm + progress * delta_fn(h_mm, h_MM),
                            "relative_visibility": progress * delta_fn(h_mm, h_MM),
                            "delta_visibility_so_far": progress * delta_fn(h_mm, h_MM),
                            "I_m": 0.4 - 0.1 * progress,
                            "I_M": 0.3 + 0.1 * progress,
                            "edges_added": 0, "edges_removed": 0, "skipped_nodes": 0,
                        }
                        lines.append(",".join(str(row[c]) for c in COLUMNS))
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture()
def records_file(tmp_path):
    return make_records(tmp_path / "records.csv")


@pytest.fixture()
def full_grid_file(tmp_path):
    values = np.round(np.arange(0.0, 1.01, 0.1), 1)
    cells = tuple((a, b) for a in values for b in values)
    return make_records(tmp_path / "grid.csv", recommenders=("ppr",), cells=cells,
                        replicates=1, delta_fn=lambda h_mm, h_MM: h_mm - h_MM)
