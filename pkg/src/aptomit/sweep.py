"""Parameter sweeps over spin speed and probe detuning, CSV/JSON output.

The steady state depends on the spin speed but not on the probe detuning,
so it is solved once per spin value and shared across the whole detuning
row; the row itself is evaluated with vectorized coefficient algebra.
Rows are independent and written into preallocated slots, so the output
is deterministic for any worker count (APTOMIT_WORKERS).
"""

from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields as dc_fields

import numpy as np

from . import __version__
from .observables import group_delay
from .params import OperatingPoint, SystemParams
from .response import SingularityError, transmission
from .spectrum import eigenfrequencies, ep_speed, sagnac_shift
from .steady import SolverError, solve_steady_state

QUANTITIES = ("T_cw", "T_ccw", "I", "tau_cw", "tau_ccw", "eigvals")
AXIS_NAMES = ("omega_spin", "delta_p")

# expansion of requested quantities into concrete output columns
_COLUMNS = {
    "T_cw": ("T_cw",),
    "T_ccw": ("T_ccw",),
    "I": ("I_dB",),
    "tau_cw": ("tau_cw_s",),
    "tau_ccw": ("tau_ccw_s",),
    "eigvals": ("re_omega_plus", "im_omega_plus",
                "re_omega_minus", "im_omega_minus", "phase_label"),
}


@dataclass(frozen=True)
class Axis:
    name: str
    min: float
    max: float
    count: int
    spacing: str = "linear"

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}")
        if self.spacing != "linear":
            raise ValueError("only linear spacing is supported")
        if self.count < 2:
            raise ValueError("axis count must be >= 2")
        if not self.min < self.max:
            raise ValueError("axis min must be < max")

    def grid(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.count)


@dataclass(frozen=True)
class SweepSpec:
    """Axes, requested quantities and evaluation options for one sweep."""

    axes: tuple
    quantities: tuple
    pump_on: bool = True
    m_variant: str = "symmetrized"
    fixed_omega_spin: float = 0.0  # used when there is no omega_spin axis
    fixed_delta_p: float = 0.0     # used when there is no delta_p axis

    def __post_init__(self):
        if not 1 <= len(self.axes) <= 2:
            raise ValueError("a sweep needs one or two axes")
        names = [a.name for a in self.axes]
        if len(set(names)) != len(names):
            raise ValueError("duplicate sweep axis")
        if not self.quantities:
            raise ValueError("at least one quantity must be requested")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise ValueError(f"unknown quantity {q} (have {QUANTITIES})")

    def axis(self, name):
        for a in self.axes:
            if a.name == name:
                return a
        return None


@dataclass
class SweepResult:
    """Dense result grids plus per-cell error markers and provenance."""

    axes: dict              # axis name -> 1d grid
    data: dict              # column name -> ndarray (n_spin, n_dp)
    errors: list            # dicts: row, col, quantity, message
    provenance: dict
    columns: tuple          # output column order

    def to_csv(self, path) -> None:
        """Long-format CSV with a '#'-prefixed provenance preamble.

        Error cells hold the literal token NaN; the error log goes to a
        sidecar file <path>.errors.log when nonempty.
        """
        spins = self.axes["omega_spin"]
        dps = self.axes["delta_p"]
        with open(path, "w") as fh:
            for key in sorted(self.provenance):
                fh.write(f"# {key} = {self.provenance[key]}\n")
            fh.write("omega_spin,delta_p," + ",".join(self.columns) + "\n")
            for i, w in enumerate(spins):
                for j, d in enumerate(dps):
                    cells = [_fmt(w), _fmt(d)]
                    for col in self.columns:
                        cells.append(_fmt(self.data[col][i, j]))
                    fh.write(",".join(cells) + "\n")
        if self.errors:
            with open(f"{path}.errors.log", "w") as fh:
                for e in self.errors:
                    fh.write(json.dumps(e) + "\n")

    def to_json(self, path) -> None:
        def cell(x):
            if isinstance(x, str):
                return x
            x = float(x)
            return None if np.isnan(x) else x

        payload = {
            "provenance": self.provenance,
            "axes": {k: list(v) for k, v in self.axes.items()},
            "columns": list(self.columns),
            "data": {k: [[cell(x) for x in row] for row in v]
                     for k, v in self.data.items()},
            "errors": self.errors,
        }
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)


def _fmt(value):
    if isinstance(value, str):
        return value
    v = float(value)
    if np.isnan(v):
        return "NaN"
    return repr(v)


def params_hash(p: SystemParams) -> str:
    lines = []
    for f in dc_fields(p):
        lines.append(f"{f.name}={getattr(p, f.name)!r}")
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()[:16]


def _provenance(p: SystemParams, spec: SweepSpec) -> dict:
    prov = {
        "generator": f"aptomit {__version__}",
        "params_hash": params_hash(p),
        "m_variant": spec.m_variant,
        "pump_on": spec.pump_on,
        "omega_ep": ep_speed(p),
        "gamma_c": p.gamma_c,
        "kappa": p.kappa,
    }
    for k, a in enumerate(spec.axes, start=1):
        prov[f"axis{k}"] = f"{a.name} {a.spacing} {a.min!r} {a.max!r} {a.count}"
    return prov


def _row(p, spec, omega_spin, dps, columns):
    """Evaluate one spin-speed row over the whole detuning grid."""
    out = {c: np.full(len(dps), np.nan, dtype=object if c == "phase_label"
                      else float) for c in columns}
    errors = []

    if "re_omega_plus" in columns:
        eig = eigenfrequencies(p, sagnac_shift(p, omega_spin))
        out["re_omega_plus"][:] = eig.omega_plus.real
        out["im_omega_plus"][:] = eig.omega_plus.imag
        out["re_omega_minus"][:] = eig.omega_minus.real
        out["im_omega_minus"][:] = eig.omega_minus.imag
        out["phase_label"][:] = eig.phase

    need_t = any(c in columns for c in ("T_cw", "T_ccw", "I_dB"))
    need_tau = "tau_cw_s" in columns or "tau_ccw_s" in columns
    if not (need_t or need_tau):
        return out, errors

    op = OperatingPoint(omega_spin=omega_spin, pump_on=spec.pump_on)
    try:
        s = solve_steady_state(p, op)
    except SolverError as exc:
        errors.append({"omega_spin": omega_spin, "col": None,
                       "quantity": "steady", "message": str(exc)})
        return out, errors

    if need_t:
        try:
            r = transmission(p, op, s=s, delta_p=dps, m_variant=spec.m_variant)
            t_cw, t_ccw = np.asarray(r.big_t_cw), np.asarray(r.big_t_ccw)
        except SingularityError as exc:
            t_cw = t_ccw = np.full(len(dps), np.nan)
            errors.append({"omega_spin": omega_spin, "col": None,
                           "quantity": "transmission", "message": str(exc)})
        if "T_cw" in columns:
            out["T_cw"][:] = t_cw
        if "T_ccw" in columns:
            out["T_ccw"][:] = t_ccw
        if "I_dB" in columns:
            with np.errstate(divide="ignore", invalid="ignore"):
                ratio = np.where((t_cw > 0) & (t_ccw > 0), t_cw / t_ccw, np.nan)
                out["I_dB"][:] = 10.0 * np.log10(ratio)
            bad = (np.isfinite(t_cw) & np.isfinite(t_ccw)
                   & ((t_cw <= 0) | (t_ccw <= 0)))
            for j in np.flatnonzero(bad):
                errors.append({"omega_spin": omega_spin, "col": int(j),
                               "quantity": "I_dB",
                               "message": "isolation undefined (T = 0)"})

    if need_tau:
        for col, direction in (("tau_cw_s", "cw"), ("tau_ccw_s", "ccw")):
            if col not in columns:
                continue
            try:
                out[col][:] = group_delay(p, op, direction, s=s, delta_p=dps,
                                          m_variant=spec.m_variant)
            except SingularityError as exc:
                errors.append({"omega_spin": omega_spin, "col": None,
                               "quantity": col, "message": str(exc)})
    return out, errors


def run_sweep(p: SystemParams, spec: SweepSpec) -> SweepResult:
    """Evaluate the requested quantities on the spec's grid.

    A missing axis collapses to the spec's fixed value, so the result is
    always a (n_spin, n_dp) grid (degenerate dimension of length 1).
    """
    spin_axis = spec.axis("omega_spin")
    dp_axis = spec.axis("delta_p")
    spins = spin_axis.grid() if spin_axis else np.array([spec.fixed_omega_spin])
    dps = dp_axis.grid() if dp_axis else np.array([spec.fixed_delta_p])

    columns = tuple(c for q in spec.quantities for c in _COLUMNS[q])
    data = {c: np.full((len(spins), len(dps)), np.nan,
                       dtype=object if c == "phase_label" else float)
            for c in columns}
    errors = []

    workers = int(os.environ.get("APTOMIT_WORKERS", "1"))

    def eval_row(i):
        return i, _row(p, spec, float(spins[i]), dps, columns)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(eval_row, range(len(spins))))
    else:
        results = [eval_row(i) for i in range(len(spins))]

    for i, (row, row_errors) in results:
        for c in columns:
            data[c][i, :] = row[c]
        for e in row_errors:
            e["row"] = i
            errors.append(e)

    return SweepResult(
        axes={"omega_spin": spins, "delta_p": dps},
        data=data, errors=errors,
        provenance=_provenance(p, spec), columns=columns)


def reproduce_figure(p: SystemParams, which: str, outdir,
                     heatmap_points: int = 400, line_points: int = 2000,
                     dp_half: float | None = None) -> dict:
    """Write the CSV bundle behind one of the published-figure layouts.

    Returns the manifest (also written as manifest.json in the bundle
    directory).  Axis ranges bracket the preset's landmarks: spin from 0
    to twice the EP speed, detuning a window around resonance scaled by
    the optical linewidth.
    """
    os.makedirs(outdir, exist_ok=True)
    w_ep = ep_speed(p)
    spin_axis = Axis("omega_spin", 0.0, 2.0 * w_ep, heatmap_points)
    spin_line = Axis("omega_spin", 0.0, 2.0 * w_ep, line_points)

    files = {}

    def emit(name, spec):
        path = os.path.join(outdir, f"{name}.csv")
        run_sweep(p, spec).to_csv(path)
        files[name] = os.path.basename(path)

    if which == "fig2":
        half = dp_half if dp_half is not None else 0.04 * p.gamma_c
        dp_axis = Axis("delta_p", -half, half, line_points)
        dp_heat = Axis("delta_p", -half, half, heatmap_points)
        emit("fig2ab_eigvals", SweepSpec((spin_line,), ("eigvals",)))
        for tag, pump in (("on", True), ("off", False)):
            for frac in (0.5, 0.9, 1.1, 1.5):
                emit(f"fig2cd_isolation_pump_{tag}_{frac:g}ep",
                     SweepSpec((dp_axis,), ("I",), pump_on=pump,
                               fixed_omega_spin=frac * w_ep))
        emit("fig2e_isolation_map",
             SweepSpec((spin_axis, dp_heat), ("I",)))
        for sign, tag in ((1.0, "plus"), (-1.0, "minus")):
            emit(f"fig2f_isolation_cut_{tag}",
                 SweepSpec((spin_line,), ("I",),
                           fixed_delta_p=sign * 0.019 * p.gamma_c))
    elif which == "fig3":
        half = dp_half if dp_half is not None else 0.04 * p.gamma_c
        dp_axis = Axis("delta_p", -half, half, line_points)
        dp_heat = Axis("delta_p", -half, half, heatmap_points)
        for frac in (0.5, 0.9, 1.1, 1.5):
            emit(f"fig3a_delay_{frac:g}ep",
                 SweepSpec((dp_axis,), ("tau_cw", "tau_ccw"),
                           fixed_omega_spin=frac * w_ep))
        emit("fig3b_delay_cw_map", SweepSpec((spin_axis, dp_heat), ("tau_cw",)))
        emit("fig3c_delay_ccw_map", SweepSpec((spin_axis, dp_heat), ("tau_ccw",)))
        for sign, tag in ((1.0, "plus"), (-1.0, "minus")):
            emit(f"fig3de_delay_cut_{tag}",
                 SweepSpec((spin_line,), ("tau_cw", "tau_ccw"),
                           fixed_delta_p=sign * 0.019 * p.gamma_c))
    elif which == "fig4":
        half = dp_half if dp_half is not None else 0.52 * p.gamma_c
        dp_heat = Axis("delta_p", -half, half, heatmap_points)
        emit("fig4a_isolation_map", SweepSpec((spin_axis, dp_heat), ("I",)))
        emit("fig4b_delay_cw_map", SweepSpec((spin_axis, dp_heat), ("tau_cw",)))
        emit("fig4c_delay_ccw_map", SweepSpec((spin_axis, dp_heat), ("tau_ccw",)))
    else:
        raise ValueError(f"unknown figure id: {which} (have fig2, fig3, fig4)")

    manifest = {"figure": which, "omega_ep": w_ep,
                "params_hash": params_hash(p), "files": files}
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1)
    return manifest
