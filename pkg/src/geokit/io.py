"""CSV helpers shared by the command line tools."""
from __future__ import annotations

import csv
import io
from pathlib import Path

import numpy as np

from geokit.curves import SampledCurve

__all__ = ["format_float", "write_rows", "curve_header", "write_curve", "read_curve"]


def format_float(x: float) -> str:
    return repr(float(x))


def write_rows(stream, header, rows) -> None:
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([format_float(v) for v in row])


def curve_header(dim: int) -> list[str]:
    """``s,x1,y1,...`` with a trailing ``t`` when ``dim`` is odd."""
    cols = ["s"]
    for j in range(dim // 2):
        cols += [f"x{j + 1}", f"y{j + 1}"]
    if dim % 2:
        cols.append("t")
    return cols


def write_curve(curve: SampledCurve, target) -> None:
    rows = np.column_stack([curve.params, curve.points])
    if isinstance(target, (str, Path)):
        with open(target, "w", newline="") as fh:
            write_rows(fh, curve_header(curve.dim), rows)
    else:
        write_rows(target, curve_header(curve.dim), rows)


def read_curve(source, closed: bool = False) -> SampledCurve:
    if isinstance(source, (str, Path)):
        text = Path(source).read_text()
    else:
        text = source.read()
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if not header or header[0].strip() != "s":
        raise ValueError("curve CSV must start with an 's' column")
    data = np.array([[float(v) for v in row] for row in reader if row], dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise ValueError("curve CSV needs at least two rows")
    return SampledCurve(data[:, 0], data[:, 1:], closed=closed)
