"""Matrix serialization.

Text format: a header line ``"rows cols"`` followed by ``rows`` lines of
``cols`` space-separated decimals. JSON format: ``{"rows", "cols",
"entries"}`` with entries in row-major order. Floats are written with 17
significant digits, which round-trips every float64 exactly.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .core import as_matrix
from .errors import MatrixParseError, NonFiniteError


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def dumps_text(M) -> str:
    M = as_matrix(M)
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    lines.extend(" ".join(_fmt(x) for x in row) for row in M)
    return "\n".join(lines) + "\n"


def dumps_json(M) -> str:
    M = as_matrix(M)
    payload = {
        "rows": M.shape[0],
        "cols": M.shape[1],
        "entries": [float(x) for x in M.ravel()],
    }
    return json.dumps(payload) + "\n"


def _parse_int(tok: str, line: int) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise MatrixParseError(f"expected an integer, got {tok!r}", line) from None
    if v < 1:
        raise MatrixParseError(f"dimension must be positive, got {v}", line)
    return v


def loads_text(text: str) -> np.ndarray:
    lines = text.splitlines()
    # skip trailing blank lines only; interior blanks are errors
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise MatrixParseError("empty input", 1)
    header = lines[0].split()
    if len(header) != 2:
        raise MatrixParseError("header must be 'rows cols'", 1)
    rows, cols = (_parse_int(t, 1) for t in header)
    found = len(lines) - 1
    if found < rows:
        raise MatrixParseError(f"expected {rows} data rows, found {found}", found + 2)
    if found > rows:
        raise MatrixParseError(f"unexpected extra row (header declares {rows})", rows + 2)
    out = np.empty((rows, cols))
    for r, raw in enumerate(lines[1:]):
        lineno = r + 2
        toks = raw.split()
        if len(toks) != cols:
            raise MatrixParseError(f"expected {cols} values, found {len(toks)}", lineno)
        try:
            out[r] = [float(t) for t in toks]
        except ValueError as exc:
            raise MatrixParseError(str(exc), lineno) from None
        if not np.all(np.isfinite(out[r])):
            raise MatrixParseError("non-finite value", lineno)
    return as_matrix(out)


def loads_json(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixParseError(exc.msg, exc.lineno) from None
    try:
        rows, cols, entries = int(obj["rows"]), int(obj["cols"]), obj["entries"]
    except (KeyError, TypeError, ValueError):
        raise MatrixParseError("JSON matrix needs integer 'rows', 'cols' and list 'entries'") from None
    if rows < 1 or cols < 1 or len(entries) != rows * cols:
        raise MatrixParseError(f"entry count {len(entries)} does not match {rows}x{cols}")
    try:
        return as_matrix(np.asarray(entries, dtype=np.float64).reshape(rows, cols))
    except (TypeError, ValueError, NonFiniteError) as exc:
        raise MatrixParseError(str(exc)) from None


def load_matrix(path) -> np.ndarray:
    """Read a matrix; ``.json`` files use the JSON form, anything else text."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return loads_json(text)
    return loads_text(text)


def save_matrix(M, path) -> None:
    path = Path(path)
    text = dumps_json(M) if path.suffix.lower() == ".json" else dumps_text(M)
    path.write_text(text)
