"""JSON and CSV formats for matrices, fusion sequences, block matrices and signals.

Complex numbers are written as ``[re, im]`` pairs. Python's float repr is
exact, so every writer here round-trips bit for bit through its reader.
"""

from __future__ import annotations

import csv
import json
import logging
from pathlib import Path

import numpy as np

from . import linalg
from .blocks import BlockOpMatrix
from .errors import FusionFrameError
from .frames import FusionSequence, WeightedSubspace, log_input_deviation
from .systems import FusionFrameSystem

log = logging.getLogger(__name__)


class FormatError(FusionFrameError, ValueError):
    """Malformed input document."""


def _complex(entry) -> complex:
    if isinstance(entry, (int, float)) and not isinstance(entry, bool):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise FormatError(f"expected a number or [re, im] pair, got {entry!r}")


def _pair(z: complex) -> list[float]:
    return [float(z.real), float(z.imag)]


def _finite(a: np.ndarray, what: str) -> np.ndarray:
    if not np.all(np.isfinite(a)):
        raise FormatError(f"{what} has non-finite entries")
    return a


# -- CMatrix ------------------------------------------------------------------


def cmatrix_to_json(a) -> dict:
    a = linalg.as_cmatrix(a)
    return {"rows": a.shape[0], "cols": a.shape[1], "data": [_pair(z) for z in a.reshape(-1)]}


def cmatrix_from_json(doc) -> np.ndarray:
    try:
        rows, cols, data = int(doc["rows"]), int(doc["cols"]), doc["data"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"CMatrix needs rows, cols and data: {exc}") from None
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise FormatError(f"CMatrix data has {len(data)} entries, expected {rows} x {cols}")
    a = np.array([_complex(e) for e in data], dtype=complex).reshape(rows, cols)
    return _finite(a, "CMatrix")


def vector_to_json(x) -> list:
    return [_pair(z) for z in np.asarray(x, dtype=complex).reshape(-1)]


def vector_from_json(doc) -> np.ndarray:
    if isinstance(doc, dict):
        a = cmatrix_from_json(doc)
        if 1 not in a.shape:
            raise FormatError(f"expected a vector, got a {a.shape} matrix")
        return a.reshape(-1)
    if not isinstance(doc, list):
        raise FormatError("vector must be a list of numbers or [re, im] pairs")
    return _finite(np.array([_complex(e) for e in doc], dtype=complex), "vector")


def read_matrix_csv(path) -> np.ndarray:
    """Real matrix, one row per line."""
    with open(path, newline="") as fh:
        rows = [[float(x) for x in row] for row in csv.reader(fh) if row and any(c.strip() for c in row)]
    if not rows or len({len(r) for r in rows}) != 1:
        raise FormatError(f"{path}: ragged or empty matrix")
    return _finite(np.array(rows, dtype=complex), str(path))


# -- FusionSequence -----------------------------------------------------------


def fusion_sequence_to_json(w: FusionSequence) -> dict:
    return {
        "ambient_dim": w.ambient_dim,
        "subspaces": [{"weight": s.weight, "basis": cmatrix_to_json(s.basis)} for s in w],
    }


def fusion_sequence_from_json(doc, tol: float = 1e-10) -> FusionSequence:
    """Load a fusion sequence; bases that are not orthonormal are re-orthonormalised with a warning."""
    try:
        n = int(doc["ambient_dim"])
        entries = list(doc["subspaces"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"fusion sequence needs ambient_dim and subspaces: {exc}") from None
    subs = []
    for i, e in enumerate(entries):
        try:
            raw = cmatrix_from_json(e["basis"])
            weight = float(e.get("weight", 1.0))
        except (KeyError, TypeError, AttributeError) as exc:
            raise FormatError(f"subspace {i}: {exc}") from None
        if raw.shape[0] != n:
            raise FormatError(f"subspace {i} lives in C^{raw.shape[0]}, expected C^{n}")
        if not weight > 0:
            raise FormatError(f"subspace {i}: weight must be positive")
        gram = linalg.adjoint(raw) @ raw
        if raw.shape[1] and np.linalg.norm(gram - np.eye(raw.shape[1]), 2) <= tol:
            basis = raw
        else:
            basis = linalg.orthonormalize(raw, tol)
            log_input_deviation(raw, basis, tol, label=f"subspace {i}")
        subs.append(WeightedSubspace(basis, weight))
    return FusionSequence(n, tuple(subs))


# -- BlockOpMatrix ------------------------------------------------------------


def block_matrix_to_json(m: BlockOpMatrix) -> dict:
    return {
        "row_dims": list(m.row_dims),
        "col_dims": list(m.col_dims),
        "blocks": [[cmatrix_to_json(b) for b in row] for row in m.blocks],
    }


def block_matrix_from_json(doc) -> BlockOpMatrix:
    try:
        row_dims = [int(k) for k in doc["row_dims"]]
        col_dims = [int(k) for k in doc["col_dims"]]
        grid = [[cmatrix_from_json(b) for b in row] for row in doc["blocks"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"block matrix needs row_dims, col_dims and blocks: {exc}") from None
    if len(grid) != len(row_dims) or any(len(row) != len(col_dims) for row in grid):
        raise FormatError("block grid does not match row_dims x col_dims")
    for j, row in enumerate(grid):
        for i, b in enumerate(row):
            if b.shape != (row_dims[j], col_dims[i]):
                raise FormatError(f"block ({j},{i}) has shape {b.shape}")
    dense = np.zeros((sum(row_dims), sum(col_dims)), dtype=complex)
    ro = np.concatenate([[0], np.cumsum(row_dims)]).astype(int)
    co = np.concatenate([[0], np.cumsum(col_dims)]).astype(int)
    for j, row in enumerate(grid):
        for i, b in enumerate(row):
            dense[ro[j]:ro[j + 1], co[i]:co[i + 1]] = b
    return BlockOpMatrix(row_dims, col_dims, dense)


# -- fusion frame systems and solve requests -----------------------------------


def system_to_json(sys: FusionFrameSystem) -> dict:
    return {
        "spaces": fusion_sequence_to_json(sys.spaces),
        "local_frames": [cmatrix_to_json(f) for f in sys.local_frames],
    }


def system_from_json(doc) -> FusionFrameSystem:
    try:
        spaces = fusion_sequence_from_json(doc["spaces"])
        frames = doc.get("local_frames")
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"system needs spaces: {exc}") from None
    if frames is None:
        return FusionFrameSystem.with_orthonormal_local_bases(spaces)
    return FusionFrameSystem(spaces, tuple(cmatrix_from_json(f) for f in frames))


def solve_request_from_json(doc) -> dict:
    try:
        return {
            "form": str(doc.get("form", "LinEq1")),
            "operator": cmatrix_from_json(doc["operator"]),
            "rhs": vector_from_json(doc["rhs"]),
            "system": system_from_json(doc["system"]),
        }
    except (KeyError, TypeError, AttributeError) as exc:
        raise FormatError(f"solve request needs operator, rhs and system: {exc}") from None


def solve_response_to_json(f, residual: float) -> dict:
    return {"f": vector_to_json(f), "residual": float(residual), "iterations": None}


# -- signals ------------------------------------------------------------------


def read_signal_csv(path) -> np.ndarray:
    """One sample per line, either ``re`` or ``re,im``."""
    out = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            cells = [c.strip() for c in row if c.strip()]
            if not cells:
                continue
            try:
                if len(cells) == 1:
                    out.append(complex(float(cells[0]), 0.0))
                elif len(cells) == 2:
                    out.append(complex(float(cells[0]), float(cells[1])))
                else:
                    raise ValueError(f"{len(cells)} fields")
            except ValueError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    return _finite(np.array(out, dtype=complex), str(path))


def write_signal_csv(path, samples, real_only: bool | None = None):
    """Write ``re,im`` per line, or ``re`` when every imaginary part is zero."""
    x = np.asarray(samples, dtype=complex).reshape(-1)
    if real_only is None:
        real_only = bool(np.all(x.imag == 0))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for z in x:
            w.writerow([repr(float(z.real))] if real_only else [repr(float(z.real)), repr(float(z.imag))])


# -- files --------------------------------------------------------------------


def read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json(path, doc):
    Path(path).write_text(dumps(doc))


def load_matrix(path) -> np.ndarray:
    """CMatrix JSON, or a real CSV matrix when the file ends in ``.csv``."""
    if str(path).endswith(".csv"):
        return read_matrix_csv(path)
    return cmatrix_from_json(read_json(path))
