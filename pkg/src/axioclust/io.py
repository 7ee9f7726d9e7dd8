"""File ingestion and report serialisation."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .data import SYMMETRY_TOL, DataSet
from .exceptions import IngestError

VIEW_KINDS = ("features", "similarity", "edgelist")
SCHEMA = "axioclust/1"


def _read_matrix(path, header=False):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise IngestError(f"cannot read file: {exc.strerror}", path) from exc
    rows, width = [], None
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if header and lineno == 1:
            continue
        if not row or all(not cell.strip() for cell in row):
            continue
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            bad = next(cell for cell in row if not _is_float(cell))
            raise IngestError(f"non-numeric cell {bad!r}", path, lineno) from None
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise IngestError(f"ragged row: {len(values)} cells, expected {width}", path, lineno)
        if not all(math.isfinite(v) for v in values):
            raise IngestError("non-finite cell", path, lineno)
        rows.append(values)
    if not rows:
        raise IngestError("no data rows", path)
    return np.array(rows, dtype=float)


def _is_float(cell):
    try:
        float(cell)
        return True
    except ValueError:
        return False


def _read_edgelist(path):
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as exc:
        raise IngestError(f"cannot read file: {exc.strerror}", path) from exc
    edges = []
    for lineno, line in enumerate(lines, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace(",", " ").split()
        if len(parts) not in (2, 3):
            raise IngestError("expected 'k l' or 'k l w'", path, lineno)
        w = 1.0
        if len(parts) == 3:
            try:
                w = float(parts[2])
            except ValueError:
                raise IngestError(f"non-numeric weight {parts[2]!r}", path, lineno) from None
            if not math.isfinite(w) or w < 0:
                raise IngestError("edge weights must be finite and nonnegative", path, lineno)
        edges.append((parts[0], parts[1], w))
    if not edges:
        raise IngestError("no edges", path)
    names = {a for a, _, _ in edges} | {b for _, b, _ in edges}
    try:
        order = sorted(names, key=int)
    except ValueError:
        order = sorted(names)
    index = {name: i for i, name in enumerate(order)}
    A = np.zeros((len(order), len(order)))
    for a, b, w in edges:
        k, l = index[a], index[b]
        A[k, l] += w
        if k != l:
            A[l, k] += w
    return A, order


def ingest(path, view: str, header: bool = False) -> DataSet:
    """Load one view of a dataset.

    ``features``: CSV, one object per row.  ``similarity``: square symmetric
    CSV.  ``edgelist``: whitespace or comma separated ``k l [w]`` lines,
    symmetrised into a dense adjacency matrix; node labels are sorted
    (numerically when they are all integers).
    """
    if view == "features":
        return DataSet(features=_read_matrix(path, header))
    if view == "similarity":
        S = _read_matrix(path, header)
        if S.shape[0] != S.shape[1]:
            raise IngestError(f"similarity matrix is {S.shape[0]} x {S.shape[1]}", path)
        if np.any(S < 0):
            k, l = np.argwhere(S < 0)[0]
            raise IngestError(f"negative similarity at ({k}, {l})", path, int(k) + 1)
        asym = np.abs(S - S.T)
        if asym.max() > SYMMETRY_TOL:
            k, l = np.unravel_index(np.argmax(asym), asym.shape)
            raise IngestError(f"asymmetric pair ({k}, {l}): {S[k, l]!r} vs {S[l, k]!r}",
                              path, int(k) + 1)
        return DataSet(similarity=(S + S.T) / 2)
    if view == "edgelist":
        A, _ = _read_edgelist(path)
        return DataSet(adjacency=A)
    raise IngestError(f"unknown view kind {view!r}; choose from {VIEW_KINDS}")


def read_partition(path) -> np.ndarray:
    """A membership matrix stored as CSV, ``c`` rows by ``n`` columns, no header."""
    return _read_matrix(path)


def write_partition(path, U):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        for row in np.asarray(U, dtype=float):
            writer.writerow([format(float(v), ".17g") for v in row])


# --- JSON --------------------------------------------------------------------

def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [_plain(v) for v in sorted(obj)]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _encode(obj, indent, level):
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(obj, float):
        if math.isnan(obj):
            return "null"
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        text = format(obj, ".17g")
        if "." not in text and "e" not in text and "n" not in text:
            text += ".0"
        return text
    return json.dumps(obj)


def dumps(obj, indent=2) -> str:
    """Deterministic JSON with floats written to 17 significant digits.

    Infinite floats become the strings ``"inf"``/``"-inf"``; NaN becomes ``null``.
    """
    return _encode(_plain(obj), indent, 0) + "\n"
