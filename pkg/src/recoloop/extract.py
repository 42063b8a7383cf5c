"""Reshape tidy records into plot-ready tables, one per figure kind."""

from __future__ import annotations

import pandas as pd

from . import SCHEMA_VERSION

FIGURE_KINDS = ("structure", "violins", "heatmap", "fm_lines", "ingroup")

_CELL_KEYS = ["recommender", "h_mm", "h_MM", "f_m"]


class SchemaError(ValueError):
    """Records are missing columns the extract needs."""


def _require(records: pd.DataFrame, columns: list[str]) -> None:
    missing = [c for c in columns if c not in records.columns]
    if missing:
        raise SchemaError("records are missing required columns: %s" % ", ".join(missing))


def _final_rows(records: pd.DataFrame) -> pd.DataFrame:
    return records.loc[records.groupby(_CELL_KEYS + ["replicate"])["step"].idxmax()]


def structure_table(records: pd.DataFrame) -> pd.DataFrame:
    """Per (recommender, network type, step): mean Gini and clustering."""
    _require(records, _CELL_KEYS + ["step", "gini_in", "clustering"])
    out = (
        records.groupby(_CELL_KEYS + ["step"])[["gini_in", "clustering"]]
        .mean()
        .reset_index()
        .rename(columns={"gini_in": "mean_gini", "clustering": "mean_clustering"})
    )
    return out


def violins_table(records: pd.DataFrame) -> pd.DataFrame:
    """One final-step visibility change per (recommender, cell, replicate)."""
    _require(records, _CELL_KEYS + ["replicate", "step", "delta_visibility_so_far"])
    final = _final_rows(records)
    out = final[_CELL_KEYS + ["replicate", "delta_visibility_so_far"]].copy()
    return out.rename(columns={"delta_visibility_so_far": "delta_fm"}).reset_index(drop=True)


def heatmap_table(records: pd.DataFrame) -> pd.DataFrame:
    """Mean final visibility change per (recommender, h_mm, h_MM)."""
    _require(records, _CELL_KEYS + ["replicate", "step", "delta_visibility_so_far"])
    final = _final_rows(records)
    out = (
        final.groupby(["recommender", "h_mm", "h_MM"])["delta_visibility_so_far"]
        .mean()
        .reset_index()
        .rename(columns={"delta_visibility_so_far": "mean_delta_fm"})
    )
    return out


def fm_lines_table(records: pd.DataFrame) -> pd.DataFrame:
    """Mean final visibility change vs minority size, per recommender and cell."""
    _require(records, _CELL_KEYS + ["replicate", "step", "delta_visibility_so_far"])
    final = _final_rows(records)
    out = (
        final.groupby(_CELL_KEYS)["delta_visibility_so_far"]
        .mean()
        .reset_index()
        .rename(columns={"delta_visibility_so_far": "mean_delta_fm"})
    )
    return out


def ingroup_table(records: pd.DataFrame) -> pd.DataFrame:
    """Mean in-group link ratios per (recommender, cell, step)."""
    _require(records, _CELL_KEYS + ["step", "I_m", "I_M"])
    out = (
        records.groupby(_CELL_KEYS + ["step"])[["I_m", "I_M"]]
        .mean()
        .reset_index()
        .rename(columns={"I_m": "mean_I_m", "I_M": "mean_I_M"})
    )
    return out


_EXTRACTORS = {
    "structure": structure_table,
    "violins": violins_table,
    "heatmap": heatmap_table,
    "fm_lines": fm_lines_table,
    "ingroup": ingroup_table,
}


def extract(records: pd.DataFrame, figure: str) -> pd.DataFrame:
    if figure not in _EXTRACTORS:
        raise ValueError("unknown figure %r; valid kinds: %s" % (figure, ", ".join(FIGURE_KINDS)))
    return _EXTRACTORS[figure](records)


def write_table(table: pd.DataFrame, path) -> None:
    with open(path, "w") as fh:
        fh.write("# recoloop-extract schema=%s\n" % SCHEMA_VERSION)
        table.to_csv(fh, index=False, float_format="%.12g")
