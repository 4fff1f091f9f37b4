"""Column-sparse matrices, one-sparse maps, and their JSON formats.

The central type is :class:`SparseMatrix`: a column-major sparse matrix whose
columns store (row, value) pairs with strictly increasing row indices and no
stored zeros.  All values are double precision and all indices are 0-based.
Instances are immutable after construction; every operation returns fresh
data.  The lone deliberate exception is :func:`stream_update`, which
accumulates into a caller-owned sketch buffer so that one turnstile update
costs O(nonzeros of that column) instead of O(m).

Matrices serialize to JSON as ``{"m": int, "n": int, "cols": [[[row, value],
...], ...]}`` with one entry list per column.  One-sparse maps serialize as
``{"m": int, "n": int, "a": [...], "sigma": [...]}``.  Loaders reject
non-finite values, duplicate or decreasing row indices, and out-of-range
indices.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, IndexOutOfRange, ZeroColumn


def _as_column(m: int, pairs: Iterable[tuple[int, float]], j: int) -> tuple[np.ndarray, np.ndarray]:
    """Validate one column's (row, value) pairs and freeze them as arrays."""
    pairs = [(int(r), float(v)) for r, v in pairs]
    kept_rows = []
    kept_vals = []
    for r, v in pairs:
        if not math.isfinite(v):
            raise ValueError(f"column {j}: non-finite value {v!r} at row {r}")
        if not 0 <= r < m:
            raise IndexOutOfRange(f"column {j}: row index {r} outside [0, {m})")
        if v != 0.0:  # constructors drop explicit zeros
            kept_rows.append(r)
            kept_vals.append(v)
    rows = np.asarray(kept_rows, dtype=np.int64)
    vals = np.asarray(kept_vals, dtype=np.float64)
    if rows.size > 1 and not np.all(np.diff(rows) > 0):
        raise ValueError(f"column {j}: row indices must be strictly increasing with no duplicates")
    rows.flags.writeable = False
    vals.flags.writeable = False
    return rows, vals


class SparseMatrix:
    """An m-by-n real matrix stored as per-column (row, value) arrays."""

    __slots__ = ("m", "n", "_cols")

    def __init__(self, m: int, n: int, columns: Sequence[Iterable[tuple[int, float]]]):
        m = int(m)
        n = int(n)
        if m < 1 or n < 1:
            raise ValueError(f"matrix shape must be positive, got {m}x{n}")
        if len(columns) != n:
            raise DimensionMismatch(f"expected {n} columns, got {len(columns)}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "_cols", tuple(_as_column(m, col, j) for j, col in enumerate(columns)))

    def __setattr__(self, name, value):
        raise AttributeError("SparseMatrix is immutable")

    @classmethod
    def from_dense(cls, array) -> "SparseMatrix":
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-d array")
        m, n = arr.shape
        cols = []
        for j in range(n):
            nz = np.nonzero(arr[:, j])[0]
            cols.append([(int(r), float(arr[r, j])) for r in nz])
        return cls(m, n, cols)

    def column(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Return (row indices, values) for column j."""
        if not 0 <= j < self.n:
            raise IndexOutOfRange(f"column index {j} outside [0, {self.n})")
        return self._cols[j]

    def column_nnz(self, j: int) -> int:
        return int(self.column(j)[0].size)

    @property
    def nnz(self) -> int:
        return sum(rows.size for rows, _ in self._cols)

    def column_dense(self, j: int) -> np.ndarray:
        rows, vals = self.column(j)
        out = np.zeros(self.m)
        out[rows] = vals
        return out

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.m, self.n))
        for j, (rows, vals) in enumerate(self._cols):
            out[rows, j] = vals
        return out

    def submatrix_dense(self, indices: Sequence[int]) -> np.ndarray:
        """Dense m-by-|I| matrix of the selected columns, in the given order."""
        out = np.zeros((self.m, len(indices)))
        for p, j in enumerate(indices):
            rows, vals = self.column(int(j))
            out[rows, p] = vals
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        if (self.m, self.n) != (other.m, other.n):
            return False
        return all(
            np.array_equal(ra, rb) and np.array_equal(va, vb)
            for (ra, va), (rb, vb) in zip(self._cols, other._cols)
        )

    def __hash__(self):
        return hash((self.m, self.n, self.nnz))

    def __repr__(self):
        return f"SparseMatrix(m={self.m}, n={self.n}, nnz={self.nnz})"


class OneSparseMap:
    """A map with exactly one nonzero per column: column i is sigma(i) * e_a(i).

    Stored as two length-n integer arrays: row choices ``a`` in [0, m) and
    signs ``sigma`` in {-1, +1}.  Applying the map to an integer vector stays
    in integer arithmetic, so kernel identities hold exactly.
    """

    __slots__ = ("m", "n", "a", "sigma")

    def __init__(self, m: int, n: int, a: Sequence[int], sigma: Sequence[int]):
        m = int(m)
        n = int(n)
        if m < 1 or n < 1:
            raise ValueError(f"map shape must be positive, got {m}x{n}")
        a_arr = np.asarray(a, dtype=np.int64)
        s_arr = np.asarray(sigma, dtype=np.int64)
        if a_arr.shape != (n,) or s_arr.shape != (n,):
            raise DimensionMismatch(f"a and sigma must both have length {n}")
        if a_arr.size and (a_arr.min() < 0 or a_arr.max() >= m):
            raise IndexOutOfRange(f"row choices must lie in [0, {m})")
        if not np.all(np.abs(s_arr) == 1):
            raise ValueError("signs must be +1 or -1")
        a_arr.flags.writeable = False
        s_arr.flags.writeable = False
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "a", a_arr)
        object.__setattr__(self, "sigma", s_arr)

    def __setattr__(self, name, value):
        raise AttributeError("OneSparseMap is immutable")

    def apply(self, x) -> np.ndarray:
        """Apply the map to x.  Integer input uses exact integer accumulation."""
        x = np.asarray(x)
        if x.shape != (self.n,):
            raise DimensionMismatch(f"expected vector of length {self.n}, got shape {x.shape}")
        dtype = np.int64 if np.issubdtype(x.dtype, np.integer) else np.float64
        y = np.zeros(self.m, dtype=dtype)
        np.add.at(y, self.a, self.sigma * x.astype(dtype))
        return y

    def to_sparse_matrix(self) -> SparseMatrix:
        cols = [[(int(self.a[i]), float(self.sigma[i]))] for i in range(self.n)]
        return SparseMatrix(self.m, self.n, cols)

    def submatrix_dense(self, indices: Sequence[int]) -> np.ndarray:
        out = np.zeros((self.m, len(indices)))
        for p, i in enumerate(indices):
            i = int(i)
            if not 0 <= i < self.n:
                raise IndexOutOfRange(f"column index {i} outside [0, {self.n})")
            out[self.a[i], p] = self.sigma[i]
        return out

    def row_loads(self) -> np.ndarray:
        """Number of columns hashed to each row (length-m histogram)."""
        return np.bincount(self.a, minlength=self.m)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OneSparseMap):
            return NotImplemented
        return (
            (self.m, self.n) == (other.m, other.n)
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.sigma, other.sigma)
        )

    def __hash__(self):
        return hash((self.m, self.n))

    def __repr__(self):
        return f"OneSparseMap(m={self.m}, n={self.n})"


# --- linear operations -------------------------------------------------------

def column_norms(A: SparseMatrix) -> np.ndarray:
    """Euclidean norm of every column, as a length-n array."""
    return np.array([math.sqrt(float(vals @ vals)) for _, vals in A._cols])


def normalize_columns(A: SparseMatrix) -> SparseMatrix:
    """Scale every column to unit norm; sparsity patterns are unchanged."""
    cols = []
    for j, (rows, vals) in enumerate(A._cols):
        norm = math.sqrt(float(vals @ vals))
        if norm == 0.0:
            raise ZeroColumn(f"column {j} has zero norm")
        cols.append(list(zip(rows.tolist(), (vals / norm).tolist())))
    return SparseMatrix(A.m, A.n, cols)


def apply(A: SparseMatrix, x) -> np.ndarray:
    """Compute A @ x, visiting only the columns where x is nonzero."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (A.n,):
        raise DimensionMismatch(f"expected vector of length {A.n}, got shape {x.shape}")
    y = np.zeros(A.m)
    for i in np.nonzero(x)[0]:
        rows, vals = A._cols[i]
        y[rows] += x[i] * vals
    return y


def stream_update(sketch: np.ndarray, A: SparseMatrix, i: int, v: float) -> np.ndarray:
    """Fold the turnstile update (i, v) into the sketch: sketch += v * A e_i.

    Mutates and returns ``sketch``; only the entries of column i are touched,
    so the cost is the column's nonzero count, not m.
    """
    if sketch.shape != (A.m,):
        raise DimensionMismatch(f"sketch must have length {A.m}, got shape {sketch.shape}")
    rows, vals = A.column(int(i))
    sketch[rows] += v * vals
    return sketch


def column_sparsity(A: SparseMatrix) -> int:
    """Maximum number of nonzeros in any single column."""
    return max(rows.size for rows, _ in A._cols)


# --- JSON formats -------------------------------------------------------------

def canonical_json(obj) -> str:
    """Serialize with sorted keys and no whitespace: stable bytes for reruns."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def matrix_to_json(A: SparseMatrix) -> str:
    cols = [[[int(r), float(v)] for r, v in zip(rows.tolist(), vals.tolist())] for rows, vals in A._cols]
    return canonical_json({"m": A.m, "n": A.n, "cols": cols})


def matrix_from_json(text: str) -> SparseMatrix:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid matrix JSON: {exc}") from exc
    if not isinstance(obj, dict) or not {"m", "n", "cols"} <= set(obj):
        raise ValueError("matrix JSON must be an object with keys m, n, cols")
    cols = obj["cols"]
    if not isinstance(cols, list):
        raise ValueError("cols must be a list of per-column entry lists")
    columns = []
    for col in cols:
        entries = []
        for pair in col:
            if not isinstance(pair, (list, tuple)) or len(pair) != 2:
                raise ValueError("each entry must be a [row, value] pair")
            entries.append((pair[0], pair[1]))
        columns.append(entries)
    return SparseMatrix(obj["m"], obj["n"], columns)


def one_sparse_map_to_json(S: OneSparseMap) -> str:
    return canonical_json({"m": S.m, "n": S.n, "a": S.a.tolist(), "sigma": S.sigma.tolist()})


def one_sparse_map_from_json(text: str) -> OneSparseMap:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid map JSON: {exc}") from exc
    if not isinstance(obj, dict) or not {"m", "n", "a", "sigma"} <= set(obj):
        raise ValueError("map JSON must be an object with keys m, n, a, sigma")
    return OneSparseMap(obj["m"], obj["n"], obj["a"], obj["sigma"])


def save_matrix(A: SparseMatrix, path) -> None:
    with open(path, "w") as fh:
        fh.write(matrix_to_json(A))


def load_matrix(path) -> SparseMatrix:
    with open(path) as fh:
        return matrix_from_json(fh.read())


def save_one_sparse_map(S: OneSparseMap, path) -> None:
    with open(path, "w") as fh:
        fh.write(one_sparse_map_to_json(S))


def load_one_sparse_map(path) -> OneSparseMap:
    with open(path) as fh:
        return one_sparse_map_from_json(fh.read())
