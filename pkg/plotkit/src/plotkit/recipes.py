"""Panel layouts for the three figure bundles.

A recipe is pure data: which CSVs feed which panel, with what axes and
labels.  Layouts follow the bundle contents documented in the
simulator's FORMATS.md; this package never recomputes any physics.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .csvio import SchemaError

SPEED_FRACS = ("0.5", "0.9", "1.1", "1.5")


@dataclass(frozen=True)
class Line:
    file: str   # dataset key inside the bundle
    x: str      # column name
    y: str
    label: str


@dataclass(frozen=True)
class Panel:
    title: str
    xlabel: str
    ylabel: str
    kind: str                   # "lines" or "heatmap"
    lines: tuple = ()
    heat_file: str = ""
    heat_column: str = ""
    diverging: bool = False
    ep_marker: str = ""         # axis carrying the EP marker: "x", "y" or ""


@dataclass(frozen=True)
class FigureRecipe:
    figure: str
    files: dict                 # dataset key -> csv path
    panels: tuple
    normalize: bool = False     # scale isolation curves to unit maximum

    def __post_init__(self):
        for panel in self.panels:
            refs = [ln.file for ln in panel.lines]
            if panel.heat_file:
                refs.append(panel.heat_file)
            for ref in refs:
                if ref not in self.files:
                    raise SchemaError(
                        f"bundle has no dataset {ref!r} needed by panel "
                        f"{panel.title!r}")


def _eig_panels():
    lines_re = tuple(Line("fig2ab_eigvals", "omega_spin", col, lab)
                     for col, lab in (("re_omega_plus", "Re w+"),
                                      ("re_omega_minus", "Re w-")))
    lines_im = tuple(Line("fig2ab_eigvals", "omega_spin", col, lab)
                     for col, lab in (("im_omega_plus", "Im w+"),
                                      ("im_omega_minus", "Im w-")))
    return (
        Panel("(a) eigenfrequencies, real part", "spin speed (Hz)",
              "Re w (Hz)", "lines", lines=lines_re, ep_marker="x"),
        Panel("(b) eigenfrequencies, imaginary part", "spin speed (Hz)",
              "Im w (Hz)", "lines", lines=lines_im, ep_marker="x"),
    )


def _spectra_panel(letter, prefix, column, ylabel, title):
    lines = tuple(Line(f"{prefix}_{frac}ep", "delta_p", column,
                       f"{frac} EP speed") for frac in SPEED_FRACS)
    return Panel(f"({letter}) {title}", "probe detuning (Hz)", ylabel,
                 "lines", lines=lines)


def _cut_panel(letter, keys, column, ylabel, title):
    lines = tuple(Line(key, "omega_spin", column, label)
                  for key, label in keys)
    return Panel(f"({letter}) {title}", "spin speed (Hz)", ylabel,
                 "lines", lines=lines, ep_marker="x")


def _heatmap_panel(letter, key, column, label):
    return Panel(f"({letter}) {label}", "probe detuning (Hz)",
                 "spin speed (Hz)", "heatmap", heat_file=key,
                 heat_column=column, diverging=True, ep_marker="y")


_LAYOUTS = {
    "fig2": lambda: _eig_panels() + (
        _spectra_panel("c", "fig2cd_isolation_pump_on", "I_dB",
                       "isolation (dB)", "isolation, pump on"),
        _spectra_panel("d", "fig2cd_isolation_pump_off", "I_dB",
                       "isolation (dB)", "isolation, pump off"),
        _heatmap_panel("e", "fig2e_isolation_map", "I_dB", "isolation (dB)"),
        _cut_panel("f", (("fig2f_isolation_cut_plus", "+ detuning cut"),
                         ("fig2f_isolation_cut_minus", "- detuning cut")),
                   "I_dB", "isolation (dB)", "isolation cuts"),
    ),
    "fig3": lambda: (
        _spectra_panel("a", "fig3a_delay", "tau_cw_s", "delay (s)",
                       "group delay, cw probe"),
        _spectra_panel("a'", "fig3a_delay", "tau_ccw_s", "delay (s)",
                       "group delay, ccw probe"),
        _heatmap_panel("b", "fig3b_delay_cw_map", "tau_cw_s",
                       "delay, cw probe (s)"),
        _heatmap_panel("c", "fig3c_delay_ccw_map", "tau_ccw_s",
                       "delay, ccw probe (s)"),
        _cut_panel("d", (("fig3de_delay_cut_plus", "cw, + cut"),),
                   "tau_cw_s", "delay (s)", "delay cut, + detuning"),
        _cut_panel("e", (("fig3de_delay_cut_minus", "cw, - cut"),),
                   "tau_cw_s", "delay (s)", "delay cut, - detuning"),
    ),
    "fig4": lambda: (
        _heatmap_panel("a", "fig4a_isolation_map", "I_dB", "isolation (dB)"),
        _heatmap_panel("b", "fig4b_delay_cw_map", "tau_cw_s",
                       "delay, cw probe (s)"),
        _heatmap_panel("c", "fig4c_delay_ccw_map", "tau_ccw_s",
                       "delay, ccw probe (s)"),
    ),
}


def recipe_for(figure: str, bundle_dir, normalize: bool = False) -> FigureRecipe:
    """Build the recipe for one figure id from a bundle directory."""
    if figure not in _LAYOUTS:
        raise SchemaError(
            f"unknown figure id {figure!r} (have {', '.join(_LAYOUTS)})")
    manifest_path = os.path.join(bundle_dir, "manifest.json")
    try:
        with open(manifest_path) as fh:
            manifest = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SchemaError(f"cannot read bundle manifest "
                          f"{manifest_path}: {exc}") from exc
    if manifest.get("figure") != figure:
        raise SchemaError(
            f"bundle at {bundle_dir} holds {manifest.get('figure')!r}, "
            f"not {figure!r}")
    files = {key: os.path.join(bundle_dir, name)
             for key, name in manifest.get("files", {}).items()}
    return FigureRecipe(figure=figure, files=files,
                        panels=_LAYOUTS[figure](), normalize=normalize)
