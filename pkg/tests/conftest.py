"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

from sketchbounds import SparseMatrix

ROOT2 = math.sqrt(2.0)


def dense(rows) -> SparseMatrix:
    """Shorthand: build a SparseMatrix from nested lists."""
    return SparseMatrix.from_dense(np.asarray(rows, dtype=np.float64))


def unit_random_sparse(m: int, n: int, nnz: int, rng: np.random.Generator) -> SparseMatrix:
    """Random matrix with exactly `nnz` gaussian entries per column, columns
    scaled to unit norm."""
    cols = []
    for _ in range(n):
        rows = np.sort(rng.choice(m, size=nnz, replace=False))
        vals = rng.standard_normal(nnz)
        while not np.all(vals):  # pragma: no cover - standard_normal is never 0 in practice
            vals = rng.standard_normal(nnz)
        vals = vals / math.sqrt(float(vals @ vals))
        cols.append(list(zip(rows.tolist(), vals.tolist())))
    return SparseMatrix(m, n, cols)


@pytest.fixture
def write_config(tmp_path):
    """Write a CLI config dict to a temp file and return its path."""

    def _write(obj, name="config.json"):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return _write
