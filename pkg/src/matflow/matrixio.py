"""File formats: the shared matrix JSON schema, CSV time series, reports.

Matrices travel as {"n": int, "re": [[...]], "im": [[...]]} with row-major
n x n real arrays.  Floats in CSV are printed with 17 significant digits so
equal runs produce byte-identical files; undefined cells are left empty.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import MatflowError
from .flows import FlowTrace


class MatrixFormatError(MatflowError, ValueError):
    pass


def fmt_float(x) -> str:
    """17-significant-digit text form; empty string for missing values."""
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    return format(x, ".17g")


def matrix_to_json(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "n": int(a.shape[0]),
        "re": [[float(x) for x in row] for row in a.real],
        "im": [[float(x) for x in row] for row in a.imag],
    }


def parse_matrix_json(obj) -> np.ndarray:
    if not isinstance(obj, dict):
        raise MatrixFormatError("matrix document must be a JSON object")
    try:
        n = int(obj["n"])
    except (KeyError, TypeError, ValueError):
        raise MatrixFormatError('matrix document needs an integer "n"') from None
    if n < 1:
        raise MatrixFormatError('"n" must be positive')
    out = np.zeros((n, n), dtype=complex)
    for key, factor in (("re", 1.0), ("im", 1j)):
        rows = obj.get(key)
        if not isinstance(rows, list) or len(rows) != n:
            raise MatrixFormatError(f'"{key}" must be a list of {n} rows')
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != n:
                raise MatrixFormatError(
                    f'ragged "{key}" array: row {i} does not have {n} entries'
                )
            out[i] += factor * np.asarray([float(x) for x in row])
    return out


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_matrix_json(json.load(fh))


def save_matrix(path, a: np.ndarray) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_json(a), fh, sort_keys=True)
        fh.write("\n")


TRACE_COLUMNS = ("t", "lambda", "norm_sq", "trace_re", "trace_im",
                 "min_eig", "residual", "log_det")


def write_trace_csv(path, trace: FlowTrace) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(TRACE_COLUMNS)]
    for o in trace.observations:
        lines.append(",".join([
            fmt_float(o.t),
            fmt_float(o.lam),
            fmt_float(o.norm_sq),
            fmt_float(o.trace.real),
            fmt_float(o.trace.imag),
            fmt_float(o.min_eig),
            fmt_float(o.residual),
            fmt_float(o.log_det),
        ]))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_spectrum_csv(path, eigenvalues: np.ndarray) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    lines = ["index,eigenvalue"]
    for i, w in enumerate(eigenvalues):
        lines.append(f"{i},{fmt_float(w)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.floating, float)):
        v = float(value)
        return None if math.isnan(v) else v
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_json_report(path, payload: dict) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_jsonable(payload), fh, sort_keys=True, indent=1)
        fh.write("\n")
