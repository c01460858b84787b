"""Result bundles and their serialization to CSV / JSON-lines.

Files are a pure function of the bundle: no timestamps, reals with 17
significant digits, complex columns split into ``<name>_re`` / ``<name>_im``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DomainError, EmitError

UNITS = "units: lengths nm, energies meV, angles rad, quadratures dimensionless, Q per unit a1*a2 area"


@dataclass(frozen=True, eq=False)
class Table:
    """Column-oriented table; all columns share one row axis."""

    columns: dict

    def __post_init__(self):
        lengths = {name: len(col) for name, col in self.columns.items()}
        if len(set(lengths.values())) > 1:
            raise DomainError(f"ragged table columns: {lengths}")

    @property
    def n_rows(self) -> int:
        return len(next(iter(self.columns.values()))) if self.columns else 0

    def expanded(self) -> dict:
        """Columns with complex data split into real / imaginary parts."""
        out = {}
        for name, col in self.columns.items():
            arr = np.asarray(col) if not isinstance(col, list) else col
            if isinstance(arr, np.ndarray) and np.iscomplexobj(arr):
                out[f"{name}_re"] = arr.real
                out[f"{name}_im"] = arr.imag
            else:
                out[name] = col
        return out


@dataclass(frozen=True, eq=False)
class Grid:
    """Values on a rectangular a1 x a2 grid, rows indexed by a2."""

    a1: np.ndarray
    a2: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (len(self.a2), len(self.a1)):
            raise DomainError(
                f"grid values {self.values.shape} do not match axes ({len(self.a2)}, {len(self.a1)})"
            )


@dataclass(frozen=True, eq=False)
class ResultBundle:
    name: str
    metadata: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)


def fmt_real(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _json_value(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if x is None or isinstance(x, str):
        return x
    x = float(x)
    return None if math.isnan(x) else x


def _csv_cell(s: str) -> str:
    if any(c in s for c in ',"\n'):
        return '"' + s.replace('"', '""') + '"'
    return s


def _render_table_csv(title: str, table: Table) -> str:
    cols = table.expanded()
    lines = [f"# qndsim {__version__} {title}", f"# {UNITS}", ",".join(cols)]
    for i in range(table.n_rows):
        lines.append(",".join(_csv_cell(fmt_real(col[i])) for col in cols.values()))
    return "\n".join(lines) + "\n"


def _render_table_jsonl(table: Table) -> str:
    cols = table.expanded()
    rows = []
    for i in range(table.n_rows):
        rows.append(json.dumps({k: _json_value(v[i]) for k, v in cols.items()}))
    return "".join(r + "\n" for r in rows)


def _axis_meta(grid: Grid) -> dict:
    return {
        "a1_min": float(grid.a1[0]),
        "a1_max": float(grid.a1[-1]),
        "n_a1": len(grid.a1),
        "a2_min": float(grid.a2[0]),
        "a2_max": float(grid.a2[-1]),
        "n_a2": len(grid.a2),
    }


def _render_grid_csv(title: str, grid: Grid) -> str:
    meta = _axis_meta(grid)
    lines = [
        f"# qndsim {__version__} {title}",
        f"# {UNITS}",
        "# row-major: one row per a2 value (ascending), columns follow a1 (ascending)",
        ",".join(f"{k}={fmt_real(v)}" for k, v in meta.items()),
    ]
    for row in grid.values:
        lines.append(",".join(fmt_real(v) for v in row))
    return "\n".join(lines) + "\n"


def _render_grid_jsonl(grid: Grid) -> str:
    lines = [json.dumps(_axis_meta(grid))]
    for a2, row in zip(grid.a2, grid.values):
        lines.append(json.dumps({"a2": float(a2), "values": [float(v) for v in row]}))
    return "".join(line + "\n" for line in lines)


def render(bundle: ResultBundle, fmt: str = "csv") -> dict[str, str]:
    """File name -> file content, without touching the disk."""
    if fmt not in ("csv", "jsonl"):
        raise DomainError(f"unknown format {fmt!r}")
    files = {f"{bundle.name}_meta.json": json.dumps(bundle.metadata, sort_keys=True, indent=2) + "\n"}
    for tname, obj in bundle.tables.items():
        title = f"{bundle.name}/{tname}"
        stem = f"{bundle.name}_{tname}"
        if isinstance(obj, Grid):
            body = _render_grid_csv(title, obj) if fmt == "csv" else _render_grid_jsonl(obj)
        else:
            body = _render_table_csv(title, obj) if fmt == "csv" else _render_table_jsonl(obj)
        files[f"{stem}.{fmt}"] = body
    return files


def emit(bundle: ResultBundle, out_dir, fmt: str = "csv") -> list[Path]:
    out = Path(out_dir)
    written = []
    files = render(bundle, fmt)
    try:
        out.mkdir(parents=True, exist_ok=True)
        for name, content in files.items():
            path = out / name
            path.write_text(content, encoding="utf-8")
            written.append(path)
    except OSError as exc:
        raise EmitError(f"cannot write results to {exc.filename or out}: {exc.strerror or exc}") from exc
    return written
