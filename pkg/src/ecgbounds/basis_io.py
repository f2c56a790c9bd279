"""Versioned JSON storage for basis sets.

    {"version": 1, "n_electrons": n,
     "functions": [{"A_lower_triangle_row_major": [...], "s": [...]}, ...]}

The lower triangle is stored row by row (A00, A10, A11, A20, ...). The shift
is flattened particle by particle (x1, y1, z1, x2, ...).
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .ecg import EcgBasisFunction
from .errors import ConfigError, DimensionMismatch

FORMAT_VERSION = 1


def lower_triangle(A: np.ndarray) -> list[float]:
    n = A.shape[0]
    return [float(A[i, j]) for i in range(n) for j in range(i + 1)]


def from_lower_triangle(values: Sequence[float], n: int) -> np.ndarray:
    if len(values) != n * (n + 1) // 2:
        raise DimensionMismatch(f"expected {n * (n + 1) // 2} lower-triangle entries, got {len(values)}")
    A = np.zeros((n, n))
    it = iter(values)
    for i in range(n):
        for j in range(i + 1):
            A[i, j] = A[j, i] = float(next(it))
    return A


def basis_to_dict(basis: Sequence[EcgBasisFunction]) -> dict:
    if not basis:
        raise ValueError("basis is empty")
    n = basis[0].n
    if any(f.n != n for f in basis):
        raise DimensionMismatch("basis functions disagree on the electron count")
    return {
        "version": FORMAT_VERSION,
        "n_electrons": n,
        "functions": [
            {"A_lower_triangle_row_major": lower_triangle(f.A), "s": [float(v) for v in f.s.ravel()]}
            for f in basis
        ],
    }


def basis_from_dict(data: dict) -> list[EcgBasisFunction]:
    try:
        version = data["version"]
        n = int(data["n_electrons"])
        entries = data["functions"]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"basis file is missing field {exc}") from exc
    if version != FORMAT_VERSION:
        raise ConfigError(f"unsupported basis file version {version}")
    out = []
    for entry in entries:
        A = from_lower_triangle(entry["A_lower_triangle_row_major"], n)
        s = np.asarray(entry["s"], dtype=float)
        if s.shape != (3 * n,):
            raise DimensionMismatch(f"shift must have {3 * n} entries")
        out.append(EcgBasisFunction(A, s.reshape(n, 3)))
    return out


def dumps_basis(basis: Sequence[EcgBasisFunction]) -> str:
    return json.dumps(basis_to_dict(basis), indent=2) + "\n"


def write_basis(path, basis: Sequence[EcgBasisFunction]) -> Path:
    path = Path(path)
    path.write_text(dumps_basis(basis))
    return path


def read_basis(path) -> list[EcgBasisFunction]:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    return basis_from_dict(data)
