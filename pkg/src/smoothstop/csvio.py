"""Small CSV readers and writers shared by the file formats.

Floats are written with ``repr``, the shortest decimal string that
round-trips to the same double, so reruns produce identical bytes.
"""
import csv
import math
from pathlib import Path

import numpy as np

from .errors import FormatError


def fmt(value):
    """Deterministic text for a CSV cell."""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def write_rows(path, header, rows):
    """Write ``rows`` (sequences matching ``header``) with ``\\n`` line endings."""
    with Path(path).open("w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")


def read_indexed_csv(path, column):
    path = Path(path)
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["index", column]:
            raise FormatError(f"{path}: expected header 'index,{column}', got {header}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise FormatError(f"{path}:{lineno}: expected 2 fields, got {len(row)}")
            try:
                idx = int(row[0])
                val = float(row[1])
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
            if idx != len(out) + 1:
                raise FormatError(f"{path}:{lineno}: expected index {len(out) + 1}, got {idx}")
            if not math.isfinite(val):
                raise FormatError(f"{path}:{lineno}: non-finite value")
            out.append(val)
    if not out:
        raise FormatError(f"{path}: no data rows")
    return out


def write_indexed_csv(path, column, values):
    with Path(path).open("w", newline="") as fh:
        fh.write(f"index,{column}\n")
        for i, v in enumerate(np.asarray(values, dtype=float).tolist(), start=1):
            fh.write(f"{i},{fmt(v)}\n")
