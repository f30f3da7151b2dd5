"""Grid files with JSON sidecars.

CSV files have a header row ``q,p,re,im`` (complex fields) or ``q,p,value``
(real fields) and one row per grid point, ``q`` varying slowest. Numbers
are written with 17 significant digits so reading them back is lossless.
Binary files hold the same columns as little-endian float64, row-major,
without a header. Each data file ``name.csv`` or ``name.bin`` has a sidecar
``name.json`` with the axes, columns and run metadata.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from ..numgrid import Axis, PhaseSpaceField

__all__ = ["write_field", "read_field", "write_json"]


def _columns(field: PhaseSpaceField, real: bool):
    q, p = field.mesh()
    cols = [q.ravel(), p.ravel()]
    vals = np.asarray(field.values)
    if real:
        return ["q", "p", "value"], cols + [np.real(vals).ravel()]
    vals = vals.astype(complex)
    return ["q", "p", "re", "im"], cols + [vals.real.ravel(), vals.imag.ravel()]


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, (np.floating, np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


def write_json(path: str | Path, data: dict) -> Path:
    """Write ``data`` as sorted, indented JSON."""
    path = Path(path)
    path.write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def write_field(out_dir: str | Path, name: str, field: PhaseSpaceField, fmt: str = "csv",
                real: bool | None = None, metadata: dict | None = None) -> Path:
    """Write a field and its sidecar; returns the data file path."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if real is None:
        real = not np.iscomplexobj(field.values)
    names, cols = _columns(field, real)
    table = np.column_stack(cols)
    if fmt == "csv":
        path = out_dir / f"{name}.csv"
        np.savetxt(path, table, fmt="%.17g", delimiter=",", header=",".join(names), comments="")
    elif fmt == "bin":
        path = out_dir / f"{name}.bin"
        table.astype("<f8").tofile(path)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    side = {
        "file": path.name,
        "format": fmt,
        "columns": names,
        "rows": int(table.shape[0]),
        "q_axis": {"min": field.q_axis.min, "max": field.q_axis.max, "n": field.q_axis.n},
        "p_axis": {"min": field.p_axis.min, "max": field.p_axis.max, "n": field.p_axis.n},
        "flags": list(field.flags),
        "metadata": metadata or {},
    }
    write_json(out_dir / f"{name}.json", side)
    return path


def read_field(path: str | Path) -> tuple[PhaseSpaceField, dict]:
    """Read a field written by :func:`write_field`; returns it with its sidecar."""
    path = Path(path)
    side = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))
    qa = Axis(**side["q_axis"])
    pa = Axis(**side["p_axis"])
    ncol = len(side["columns"])
    if side["format"] == "csv":
        table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    else:
        table = np.fromfile(path, dtype="<f8").reshape(-1, ncol)
    if ncol == 3:
        vals = table[:, 2]
    else:
        vals = table[:, 2] + 1j * table[:, 3]
    return PhaseSpaceField(qa, pa, vals.reshape(qa.n, pa.n)), side
