"""
Matrix files.

A matrix file is a JSON object::

    {"n_modes": 2, "ordering": "qpqp", "data": [row-major 2N*2N reals]}
"""

import json
import math
from pathlib import Path

import numpy as np

from .errors import MatrixFileError


def matrix_to_dict(M):
    M = np.asarray(M, dtype=float)
    dim = M.shape[0]
    if M.shape != (dim, dim) or dim % 2:
        raise ValueError(f"phase-space matrices must be 2N x 2N, got {M.shape}")
    return {"n_modes": dim // 2, "ordering": "qpqp", "data": [float(x) for x in M.reshape(-1)]}


def matrix_from_dict(obj, source="<matrix>"):
    if not isinstance(obj, dict):
        raise MatrixFileError(f"{source}: top level must be a JSON object")
    missing = {"n_modes", "ordering", "data"} - obj.keys()
    if missing:
        raise MatrixFileError(f"{source}: missing key(s) {sorted(missing)}")
    n = obj["n_modes"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MatrixFileError(f"{source}: n_modes must be a positive integer, got {n!r}")
    if obj["ordering"] != "qpqp":
        raise MatrixFileError(f"{source}: unsupported ordering {obj['ordering']!r} (expected 'qpqp')")
    data = obj["data"]
    dim = 2 * n
    if not isinstance(data, list) or len(data) != dim * dim:
        got = len(data) if isinstance(data, list) else type(data).__name__
        raise MatrixFileError(f"{source}: data must hold {dim * dim} numbers, got {got}")
    for i, x in enumerate(data):
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
            raise MatrixFileError(f"{source}: data[{i}] = {x!r} is not a finite number")
    return np.array(data, dtype=float).reshape(dim, dim)


def save_matrix(path, M):
    Path(path).write_text(json.dumps(matrix_to_dict(M), indent=2) + "\n")


def load_matrix(path):
    """
    Read a matrix file.

    Raises
    ------
    MatrixFileError
        On unreadable files, invalid JSON (with line and column) or schema
        violations.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MatrixFileError(f"{path}: {exc.strerror}") from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFileError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return matrix_from_dict(obj, str(path))
