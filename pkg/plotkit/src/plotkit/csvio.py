"""Reader for the documented aptomit CSV schema.

The tables are long-format with a '#'-prefixed provenance preamble (see
FORMATS.md in the simulator repo).  This module knows nothing about the
physics; it only parses and validates files.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SchemaError(Exception):
    """Input file does not match the documented schema."""

    def __init__(self, message, column=None):
        super().__init__(message)
        self.column = column


@dataclass(frozen=True)
class AxisInfo:
    name: str
    min: float
    max: float
    count: int


@dataclass
class Table:
    """One parsed CSV: provenance, column arrays and axis descriptors."""

    path: str
    provenance: dict
    columns: list
    data: dict  # column name -> ndarray (float64, or object for labels)

    def require(self, *names):
        for name in names:
            if name not in self.data:
                raise SchemaError(
                    f"{self.path}: required column {name!r} missing "
                    f"(have {', '.join(self.columns)})", column=name)

    def axes(self):
        """Swept-axis descriptors (axis1, axis2, ...) from the preamble."""
        out = []
        for k in sorted(self.provenance):
            if not k.startswith("axis"):
                continue
            parts = str(self.provenance[k]).split()
            if len(parts) != 5:
                raise SchemaError(f"{self.path}: malformed {k} descriptor")
            out.append(AxisInfo(parts[0], float(parts[2]), float(parts[3]),
                                int(parts[4])))
        return out

    def grid(self, column):
        """Reshape a long-format column to (n_spin, n_dp).

        Row order is the documented one: omega_spin outer, delta_p inner.
        """
        self.require("omega_spin", "delta_p", column)
        spins = np.unique(self.data["omega_spin"])
        dps = np.unique(self.data["delta_p"])
        values = self.data[column]
        if len(values) != len(spins) * len(dps):
            raise SchemaError(
                f"{self.path}: {len(values)} rows do not fill a "
                f"{len(spins)}x{len(dps)} grid", column=column)
        return spins, dps, values.reshape(len(spins), len(dps))


def _parse_value(text: str):
    try:
        return float(text)
    except ValueError:
        return text


def load_table(path) -> Table:
    provenance = {}
    header = None
    rows = []
    try:
        with open(path) as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                if line.startswith("#"):
                    key, sep, value = line.lstrip("# ").partition("=")
                    if sep:
                        provenance[key.strip()] = _parse_value(value.strip())
                    continue
                if header is None:
                    header = line.split(",")
                    continue
                rows.append(line.split(","))
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if header is None:
        raise SchemaError(f"{path}: no header row found")

    data = {}
    for j, name in enumerate(header):
        cells = []
        for r in rows:
            if len(r) != len(header):
                raise SchemaError(f"{path}: ragged row with {len(r)} cells")
            cells.append(r[j])
        if name == "phase_label":
            data[name] = np.array(cells, dtype=object)
        else:
            try:
                # the writer uses repr() floats and the literal token NaN
                data[name] = np.array([float(c) for c in cells])
            except ValueError:
                raise SchemaError(
                    f"{path}: non-numeric cell in column {name!r}",
                    column=name) from None
    return Table(path=str(path), provenance=provenance,
                 columns=list(header), data=data)
