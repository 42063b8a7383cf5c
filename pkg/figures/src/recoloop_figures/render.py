"""Figure builders: structure lines, visibility violins, homophily heatmaps.

Inputs are tidy per-step records (or the matching pre-aggregated extract
tables); every builder accepts either and aggregates raw records itself.
Rendering is deterministic: a pinned rc style plus salted SVG ids means
the same input file always produces byte-identical output.
"""

from __future__ import annotations

import dataclasses
import warnings

import matplotlib
import numpy as np
import pandas as pd

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)
from matplotlib import colors  # noqa: E402

from .io import read_records, require_columns

FIGURE_KINDS = ("structure", "violins", "heatmap", "fm_lines", "ingroup")

# full homophily plane, rendered even where data is missing
GRID_VALUES = np.round(np.arange(0.0, 1.01, 0.1), 1)

# orange = minority over-represented / gaining, blue = losing, white = parity
DIVERGING_CMAP = colors.LinearSegmentedColormap.from_list(
    "visibility", ["#2166ac", "#f7f7f7", "#e08214"]
)

_PALETTE = ("#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
            "#937860", "#da8bc3", "#8c8c8c")

STYLE = {
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "svg.hashsalt": "recoloop-figures",
}

RASTER_FORMATS = {".png", ".jpg"}


@dataclasses.dataclass(frozen=True)
class FigureSpec:
    kind: str
    records_path: str
    out_path: str
    recommenders: tuple[str, ...] | None = None
    cells: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(
                "unknown figure kind %r; valid kinds: %s" % (self.kind, ", ".join(FIGURE_KINDS))
            )


def _apply_filters(df: pd.DataFrame, spec: FigureSpec) -> pd.DataFrame:
    if spec.recommenders is not None:
        df = df[df["recommender"].isin(spec.recommenders)]
    if spec.cells is not None and {"h_mm", "h_MM"} <= set(df.columns):
        keep = pd.Series(False, index=df.index)
        for h_mm, h_MM in spec.cells:
            keep |= (df["h_mm"] == h_mm) & (df["h_MM"] == h_MM)
        df = df[keep]
    if df.empty:
        raise ValueError("no rows left after filtering; nothing to plot")
    return df


def _recommenders(df: pd.DataFrame) -> list[str]:
    return sorted(df["recommender"].unique())


def _color(index: int) -> str:
    return _PALETTE[index % len(_PALETTE)]


def _final_rows(df: pd.DataFrame) -> pd.DataFrame:
    keys = [c for c in ("recommender", "h_mm", "h_MM", "f_m", "replicate") if c in df.columns]
    return df.loc[df.groupby(keys)["step"].idxmax()]


# -- per-kind builders -----------------------------------------------------


def _structure_figure(df: pd.DataFrame):
    if "mean_gini" not in df.columns:
        require_columns(df, ["recommender", "step", "gini_in", "clustering"])
        df = (
            df.groupby(["recommender", "step"])[["gini_in", "clustering"]]
            .mean()
            .reset_index()
            .rename(columns={"gini_in": "mean_gini", "clustering": "mean_clustering"})
        )
    fig, (ax_gini, ax_clus) = plt.subplots(1, 2, figsize=(7.0, 2.8))
    for i, rec in enumerate(_recommenders(df)):
        sub = df[df["recommender"] == rec].sort_values("step")
        ax_gini.plot(sub["step"], sub["mean_gini"], color=_color(i), label=rec)
        ax_clus.plot(sub["step"], sub["mean_clustering"], color=_color(i), label=rec)
    ax_gini.set_xlabel("step")
    ax_gini.set_ylabel("Gini of in-degree")
    ax_clus.set_xlabel("step")
    ax_clus.set_ylabel("clustering coefficient")
    ax_clus.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def _violins_figure(df: pd.DataFrame):
    if "delta_fm" not in df.columns:
        require_columns(df, ["recommender", "step", "delta_visibility_so_far"])
        df = _final_rows(df).rename(columns={"delta_visibility_so_far": "delta_fm"})
    recs = _recommenders(df)
    groups = [df[df["recommender"] == r]["delta_fm"].to_numpy() for r in recs]
    fig, ax = plt.subplots(figsize=(1.1 + 1.0 * len(recs), 3.0))
    parts = ax.violinplot(groups, showmeans=True, showextrema=False)
    for i, body in enumerate(parts["bodies"]):
        body.set_facecolor(_color(i))
        body.set_alpha(0.7)
    ax.axhline(0.0, color="0.6", linewidth=0.8, zorder=0)
    ax.set_xticks(range(1, len(recs) + 1), recs)
    ax.set_ylabel(r"$\Delta$ minority visibility")
    fig.tight_layout()
    return fig


def _heatmap_grid(df: pd.DataFrame) -> np.ma.MaskedArray:
    """121-cell grid of mean final visibility change; missing cells masked.

    Rows index h_MM, columns h_mm, both snapped to the nearest 0.1.
    """
    grid = np.full((len(GRID_VALUES), len(GRID_VALUES)), np.nan)
    for (h_mm, h_MM), sub in df.groupby(["h_mm", "h_MM"]):
        col = int(round(float(h_mm) * 10))
        row = int(round(float(h_MM) * 10))
        if 0 <= row < grid.shape[0] and 0 <= col < grid.shape[1]:
            grid[row, col] = sub["mean_delta_fm"].mean()
    return np.ma.masked_invalid(grid)


def _aggregate_delta(df: pd.DataFrame) -> pd.DataFrame:
    if "mean_delta_fm" in df.columns:
        return df
    require_columns(df, ["recommender", "h_mm", "h_MM", "step", "delta_visibility_so_far"])
    final = _final_rows(df)
    keys = [c for c in ("recommender", "h_mm", "h_MM", "f_m") if c in final.columns]
    return (
        final.groupby(keys)["delta_visibility_so_far"]
        .mean()
        .reset_index()
        .rename(columns={"delta_visibility_so_far": "mean_delta_fm"})
    )


def _heatmap_figure(df: pd.DataFrame):
    df = _aggregate_delta(df)
    recs = _recommenders(df)
    fig, axes = plt.subplots(1, len(recs), figsize=(2.6 * len(recs) + 0.8, 2.8),
                             squeeze=False)
    vmax = 1e-9
    grids = {}
    for rec in recs:
        grids[rec] = _heatmap_grid(df[df["recommender"] == rec])
        if grids[rec].count():
            vmax = max(vmax, float(np.abs(grids[rec]).max()))
    missing_total = 0
    for ax, rec in zip(axes[0], recs):
        grid = grids[rec]
        missing_total += int(grid.mask.sum())
        # hatched background shows through wherever the grid is masked
        ax.pcolormesh(np.zeros_like(grid.data), cmap="Greys", vmin=0, vmax=1,
                      hatch="///", edgecolor="0.8", linewidth=0.2)
        ax.pcolormesh(grid, cmap=DIVERGING_CMAP, vmin=-vmax, vmax=vmax)
        ticks = np.arange(len(GRID_VALUES)) + 0.5
        ax.set_xticks(ticks[::2], ["%.1f" % v for v in GRID_VALUES[::2]], fontsize=7)
        ax.set_yticks(ticks[::2], ["%.1f" % v for v in GRID_VALUES[::2]], fontsize=7)
        ax.set_xlabel("$h_{mm}$")
        ax.set_ylabel("$h_{MM}$")
        ax.set_title(rec, fontsize=9)
        ax.set_aspect("equal")
    if missing_total:
        warnings.warn(
            "%d of %d heatmap cells have no data (rendered hatched)"
            % (missing_total, len(recs) * GRID_VALUES.size ** 2)
        )
    mappable = plt.cm.ScalarMappable(
        norm=colors.Normalize(vmin=-vmax, vmax=vmax), cmap=DIVERGING_CMAP
    )
    fig.colorbar(mappable, ax=list(axes[0]), label=r"$\Delta$ minority visibility",
                 fraction=0.05)
    return fig


def _fm_lines_figure(df: pd.DataFrame):
    df = _aggregate_delta(df)
    require_columns(df, ["f_m"])
    cells = sorted(set(zip(df["h_mm"], df["h_MM"])))
    fig, axes = plt.subplots(1, len(cells), figsize=(2.6 * len(cells) + 0.5, 2.8),
                             squeeze=False, sharey=True)
    for ax, (h_mm, h_MM) in zip(axes[0], cells):
        cell = df[(df["h_mm"] == h_mm) & (df["h_MM"] == h_MM)]
        for i, rec in enumerate(_recommenders(df)):
            sub = cell[cell["recommender"] == rec].sort_values("f_m")
            ax.plot(sub["f_m"], sub["mean_delta_fm"], marker="o", markersize=3,
                    color=_color(i), label=rec)
        ax.axhline(0.0, color="0.6", linewidth=0.8, zorder=0)
        ax.set_title("$h_{mm}$=%g, $h_{MM}$=%g" % (h_mm, h_MM), fontsize=9)
        ax.set_xlabel("$f_m$")
    axes[0][0].set_ylabel(r"$\Delta$ minority visibility")
    axes[0][-1].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


def _ingroup_figure(df: pd.DataFrame):
    if "mean_I_m" not in df.columns:
        require_columns(df, ["recommender", "step", "I_m", "I_M"])
        df = (
            df.groupby(["recommender", "step"])[["I_m", "I_M"]]
            .mean()
            .reset_index()
            .rename(columns={"I_m": "mean_I_m", "I_M": "mean_I_M"})
        )
    recs = _recommenders(df)
    fig, axes = plt.subplots(1, len(recs), figsize=(2.2 * len(recs) + 0.5, 2.6),
                             squeeze=False, sharey=True)
    for ax, rec in zip(axes[0], recs):
        sub = df[df["recommender"] == rec].sort_values("step")
        ax.plot(sub["step"], sub["mean_I_m"], color=_color(0), label="$I_m$")
        ax.plot(sub["step"], sub["mean_I_M"], color=_color(1), label="$I_M$")
        ax.set_title(rec, fontsize=9)
        ax.set_xlabel("step")
    axes[0][0].set_ylabel("in-group link ratio")
    axes[0][-1].legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "structure": _structure_figure,
    "violins": _violins_figure,
    "heatmap": _heatmap_figure,
    "fm_lines": _fm_lines_figure,
    "ingroup": _ingroup_figure,
}


def build_figure(df: pd.DataFrame, spec: FigureSpec):
    """Build the matplotlib Figure for a spec from an already-loaded frame."""
    require_columns(df, ["recommender"])
    with plt.rc_context(STYLE):
        return _BUILDERS[spec.kind](_apply_filters(df, spec))


def render(spec: FigureSpec) -> list[str]:
    """Render a spec to disk; vector outputs also get a PNG preview.

    Returns the list of files written.
    """
    df = read_records(spec.records_path)
    fig = build_figure(df, spec)
    out = str(spec.out_path)
    suffix = out[out.rfind("."):].lower() if "." in out else ""
    written = []
    with plt.rc_context(STYLE):
        fig.savefig(out, metadata=_stable_metadata(suffix))
        written.append(out)
        if suffix not in RASTER_FORMATS:
            preview = out[: out.rfind(".")] + ".png"
            fig.savefig(preview)
            written.append(preview)
    plt.close(fig)
    return written


def _stable_metadata(suffix: str) -> dict | None:
    # strip timestamps so re-rendering the same input is byte-identical
    if suffix == ".pdf":
        return {"CreationDate": None}
    if suffix == ".svg":
        return {"Date": None}
    return None
