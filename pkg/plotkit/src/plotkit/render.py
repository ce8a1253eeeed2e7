"""Deterministic batch renderer for figure recipes.

Rendering is pure in its inputs: fixed backend, fonts, size and
colormaps, and metadata-stripped output, so the same CSV bundle always
produces the same bytes.  NaN cells appear as gaps; the EP spin speed
from the provenance preamble is drawn as a dashed marker line.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import numpy as np
from matplotlib import pyplot as plt

from .csvio import SchemaError, load_table
from .recipes import FigureRecipe

_RC = {
    "font.family": "DejaVu Sans",
    "font.size": 9,
    "figure.dpi": 100,
    "savefig.dpi": 100,
    "svg.hashsalt": "plotkit",
    "axes.grid": False,
}
PANEL_W, PANEL_H = 4.0, 3.0
DIVERGING_CMAP = "RdBu_r"
EP_STYLE = {"color": "0.25", "linestyle": "--", "linewidth": 0.8}


def _axis_info(table, name):
    for ax in table.axes():
        if ax.name == name:
            return ax
    return None


def _ep_speed(table):
    value = table.provenance.get("omega_ep")
    return float(value) if value is not None else None


def _draw_lines(ax, panel, tables, normalize):
    scale = 1.0
    if normalize:
        peak = max(float(np.nanmax(np.abs(tables[ln.file].data[ln.y])))
                   for ln in panel.lines)
        if peak > 0.0:
            scale = 1.0 / peak
    ep = None
    for ln in panel.lines:
        table = tables[ln.file]
        table.require(ln.x, ln.y)
        ax.plot(table.data[ln.x], table.data[ln.y] * scale,
                linewidth=1.0, label=ln.label)
        info = _axis_info(table, ln.x)
        if info is not None:
            ax.set_xlim(info.min, info.max)
        ep = _ep_speed(table) if ep is None else ep
    if panel.ep_marker == "x" and ep is not None:
        ax.axvline(ep, **EP_STYLE)
    ax.legend(loc="best", fontsize=7)


def _draw_heatmap(fig, ax, panel, table):
    spins, dps, grid = table.grid(panel.heat_column)
    kwargs = {}
    if panel.diverging:
        peak = float(np.nanmax(np.abs(grid))) if np.any(np.isfinite(grid)) \
            else 1.0
        kwargs = {"cmap": DIVERGING_CMAP, "vmin": -peak, "vmax": peak}
    mesh = ax.pcolormesh(dps, spins, np.ma.masked_invalid(grid),
                         shading="nearest", rasterized=True, **kwargs)
    fig.colorbar(mesh, ax=ax)
    for name, setter in (("delta_p", ax.set_xlim),
                         ("omega_spin", ax.set_ylim)):
        info = _axis_info(table, name)
        if info is not None:
            setter(info.min, info.max)
    ep = _ep_speed(table)
    if panel.ep_marker == "y" and ep is not None:
        ax.axhline(ep, **EP_STYLE)


def render(recipe: FigureRecipe):
    """Render a recipe into a matplotlib Figure (not yet saved)."""
    tables = {key: load_table(path) for key, path in recipe.files.items()}
    n = len(recipe.panels)
    ncols = min(3, n)
    nrows = math.ceil(n / ncols)
    with plt.rc_context(_RC):
        fig, axes = plt.subplots(
            nrows, ncols, figsize=(PANEL_W * ncols, PANEL_H * nrows),
            squeeze=False)
        flat = axes.ravel()
        for ax in flat[n:]:
            ax.set_axis_off()
        for panel, ax in zip(recipe.panels, flat):
            ax.set_title(panel.title, fontsize=8)
            ax.set_xlabel(panel.xlabel)
            ax.set_ylabel(panel.ylabel)
            if panel.kind == "heatmap":
                _draw_heatmap(fig, ax, panel, tables[panel.heat_file])
            elif panel.kind == "lines":
                _draw_lines(ax, panel, tables, recipe.normalize)
            else:
                raise SchemaError(f"unknown panel kind {panel.kind!r}")
        fig.tight_layout()
    return fig


def save(fig, out_path) -> None:
    """Write the figure with volatile metadata stripped."""
    path = str(out_path)
    if path.endswith(".png"):
        fig.savefig(path, metadata={"Software": None})
    elif path.endswith(".svg"):
        fig.savefig(path, metadata={"Date": None})
    else:
        fig.savefig(path)
    plt.close(fig)


def render_figure(figure_id, bundle_dir, out_path,
                  normalize: bool = False) -> None:
    from .recipes import recipe_for

    save(render(recipe_for(figure_id, bundle_dir, normalize=normalize)),
         out_path)
