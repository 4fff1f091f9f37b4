"""Sparse matrix core: construction, application, streaming, JSON."""

import json
import math

import numpy as np
import pytest

from sketchbounds import (
    DimensionMismatch,
    IndexOutOfRange,
    OneSparseMap,
    SparseMatrix,
    ZeroColumn,
    apply,
    column_norms,
    column_sparsity,
    load_matrix,
    load_one_sparse_map,
    matrix_from_json,
    matrix_to_json,
    normalize_columns,
    one_sparse_map_from_json,
    one_sparse_map_to_json,
    save_matrix,
    save_one_sparse_map,
    stream_update,
)
from sketchbounds.matrices import canonical_json

from conftest import dense

DENSE_4X3 = np.array(
    [
        [1.5, 0.0, -2.0],
        [0.0, 0.0, 0.25],
        [-0.5, 3.0, 0.0],
        [0.0, 0.0, 1.0],
    ]
)


class TestConstruction:
    def test_from_dense_round_trip(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        assert A.m == 4 and A.n == 3
        assert np.array_equal(A.to_dense(), DENSE_4X3)
        assert A.nnz == 6
        assert A.column_nnz(0) == 2
        assert A.column_nnz(1) == 1
        assert column_sparsity(A) == 3

    def test_columns_store_increasing_rows(self):
        A = SparseMatrix(4, 1, [[(1, 2.0), (3, -1.0)]])
        rows, vals = A.column(0)
        assert rows.tolist() == [1, 3]
        assert vals.tolist() == [2.0, -1.0]

    def test_explicit_zeros_are_dropped(self):
        A = SparseMatrix(3, 1, [[(0, 0.0), (2, 1.0)]])
        assert A.column_nnz(0) == 1
        assert A.column(0)[0].tolist() == [2]

    def test_rejects_decreasing_rows(self):
        with pytest.raises(ValueError):
            SparseMatrix(4, 1, [[(2, 1.0), (1, 1.0)]])

    def test_rejects_duplicate_rows(self):
        with pytest.raises(ValueError):
            SparseMatrix(4, 1, [[(1, 1.0), (1, 2.0)]])

    def test_rejects_out_of_range_row(self):
        with pytest.raises(IndexOutOfRange):
            SparseMatrix(4, 1, [[(4, 1.0)]])
        with pytest.raises(IndexOutOfRange):
            SparseMatrix(4, 1, [[(-1, 1.0)]])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            SparseMatrix(2, 1, [[(0, math.nan)]])
        with pytest.raises(ValueError):
            SparseMatrix(2, 1, [[(0, math.inf)]])

    def test_rejects_wrong_column_count(self):
        with pytest.raises(DimensionMismatch):
            SparseMatrix(2, 3, [[(0, 1.0)]])

    def test_rejects_empty_shape(self):
        with pytest.raises(ValueError):
            SparseMatrix(0, 1, [[]])

    def test_immutable(self):
        A = dense([[1.0]])
        with pytest.raises(AttributeError):
            A.m = 5
        rows, vals = A.column(0)
        with pytest.raises(ValueError):
            vals[0] = 2.0

    def test_structural_equality(self):
        A = dense([[1.0, 0.0], [0.0, 2.0]])
        B = dense([[1.0, 0.0], [0.0, 2.0]])
        C = dense([[1.0, 0.0], [0.0, 2.5]])
        assert A == B
        assert A != C

    def test_column_index_checked(self):
        A = dense([[1.0]])
        with pytest.raises(IndexOutOfRange):
            A.column(1)

    def test_submatrix_dense_selects_in_order(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        got = A.submatrix_dense([2, 0])
        assert np.array_equal(got, DENSE_4X3[:, [2, 0]])


class TestApply:
    def test_matches_dense_on_basis_vectors(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1.0
            assert np.array_equal(apply(A, e), DENSE_4X3[:, i])

    def test_matches_dense_product(self):
        rng = np.random.default_rng(0)
        D = rng.standard_normal((7, 5))
        D[rng.random((7, 5)) < 0.5] = 0.0
        D[0, :] = 1.0  # no zero columns
        A = SparseMatrix.from_dense(D)
        x = rng.standard_normal(5)
        assert np.max(np.abs(apply(A, x) - D @ x)) <= 1e-12

    def test_linearity(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        rng = np.random.default_rng(1)
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        lhs = apply(A, 2.0 * x + 3.0 * y)
        rhs = 2.0 * apply(A, x) + 3.0 * apply(A, y)
        assert np.max(np.abs(lhs - rhs)) <= 1e-12

    def test_dimension_checked(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        with pytest.raises(DimensionMismatch):
            apply(A, np.ones(4))


class TestStreamUpdate:
    def test_accumulates_like_apply(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        sketch = np.zeros(4)
        x = np.zeros(3)
        updates = [(0, 1.5), (2, -0.5), (0, 0.25), (1, 2.0), (2, 0.125)]
        for i, v in updates:
            out = stream_update(sketch, A, i, v)
            assert out is sketch  # in-place contract
            x[i] += v
        assert np.max(np.abs(sketch - apply(A, x))) <= 1e-12

    def test_touches_only_the_columns_rows(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        sketch = np.zeros(4)
        stream_update(sketch, A, 2, 1.0)
        assert np.nonzero(sketch)[0].tolist() == A.column(2)[0].tolist()

    def test_shape_checked(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        with pytest.raises(DimensionMismatch):
            stream_update(np.zeros(3), A, 0, 1.0)


class TestNormalize:
    def test_unit_norms_after(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        B = normalize_columns(A)
        assert np.max(np.abs(column_norms(B) - 1.0)) <= 1e-15

    def test_idempotent(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        once = normalize_columns(A)
        twice = normalize_columns(once)
        assert np.max(np.abs(once.to_dense() - twice.to_dense())) <= 1e-15

    def test_zero_column_rejected(self):
        A = SparseMatrix(2, 2, [[(0, 1.0)], []])
        with pytest.raises(ZeroColumn):
            normalize_columns(A)

    def test_pattern_preserved(self):
        A = SparseMatrix.from_dense(DENSE_4X3)
        B = normalize_columns(A)
        for j in range(A.n):
            assert np.array_equal(A.column(j)[0], B.column(j)[0])


class TestOneSparseMap:
    def test_construction_and_validation(self):
        S = OneSparseMap(3, 4, [0, 2, 2, 1], [1, -1, 1, 1])
        assert S.m == 3 and S.n == 4
        assert S.row_loads().tolist() == [1, 1, 2]
        with pytest.raises(IndexOutOfRange):
            OneSparseMap(3, 2, [0, 3], [1, 1])
        with pytest.raises(ValueError):
            OneSparseMap(3, 2, [0, 1], [1, 2])
        with pytest.raises(DimensionMismatch):
            OneSparseMap(3, 2, [0], [1, 1])

    def test_apply_matches_dense(self):
        S = OneSparseMap(3, 4, [0, 2, 2, 1], [1, -1, 1, 1])
        D = S.to_sparse_matrix().to_dense()
        x = np.array([1.0, 2.0, -3.0, 0.5])
        assert np.max(np.abs(S.apply(x) - D @ x)) <= 1e-12

    def test_integer_apply_stays_integer(self):
        S = OneSparseMap(2, 3, [0, 0, 1], [1, -1, 1])
        y = S.apply(np.array([1, 1, 0], dtype=np.int64))
        assert y.dtype == np.int64
        assert y.tolist() == [0, 0]  # exact cancellation

    def test_apply_on_basis(self):
        S = OneSparseMap(4, 3, [2, 0, 2], [-1, 1, 1])
        for i in range(3):
            e = np.zeros(3)
            e[i] = 1.0
            y = S.apply(e)
            assert y[S.a[i]] == S.sigma[i]
            assert np.count_nonzero(y) == 1

    def test_immutable(self):
        S = OneSparseMap(2, 1, [0], [1])
        with pytest.raises(AttributeError):
            S.m = 3
        with pytest.raises(ValueError):
            S.a[0] = 1

    def test_equality(self):
        S = OneSparseMap(2, 2, [0, 1], [1, -1])
        assert S == OneSparseMap(2, 2, [0, 1], [1, -1])
        assert S != OneSparseMap(2, 2, [0, 1], [1, 1])


class TestJson:
    def test_canonical_form(self):
        text = canonical_json({"b": 1, "a": [1.5, 2]})
        assert text == '{"a":[1.5,2],"b":1}\n'

    def test_matrix_round_trip_is_exact(self):
        A = SparseMatrix.from_dense(DENSE_4X3 / 3.0)  # non-dyadic values
        B = matrix_from_json(matrix_to_json(A))
        assert A == B  # bitwise: repr-style float serialization round-trips

    def test_matrix_json_shape(self):
        A = dense([[1.0, 0.0], [0.0, -2.0]])
        obj = json.loads(matrix_to_json(A))
        assert obj == {"m": 2, "n": 2, "cols": [[[0, 1.0]], [[1, -2.0]]]}

    def test_map_round_trip(self):
        S = OneSparseMap(3, 4, [0, 2, 2, 1], [1, -1, 1, 1])
        assert one_sparse_map_from_json(one_sparse_map_to_json(S)) == S

    @pytest.mark.parametrize(
        "text",
        [
            "not json",
            '{"m":2,"n":1}',
            '{"m":2,"n":1,"cols":[[[0]]]}',
            '{"m":2,"n":1,"cols":[[[0,NaN]]]}',
            '{"m":2,"n":1,"cols":[[[0,1.0],[0,2.0]]]}',
            '{"m":2,"n":1,"cols":[[[5,1.0]]]}',
            '{"m":2,"n":2,"cols":[[[0,1.0]]]}',
        ],
    )
    def test_matrix_loader_rejections(self, text):
        with pytest.raises(ValueError):
            matrix_from_json(text)

    @pytest.mark.parametrize(
        "text",
        [
            "[]",
            '{"m":2,"n":2,"a":[0,1]}',
            '{"m":2,"n":2,"a":[0,5],"sigma":[1,1]}',
            '{"m":2,"n":2,"a":[0,1],"sigma":[1,0]}',
        ],
    )
    def test_map_loader_rejections(self, text):
        with pytest.raises(ValueError):
            one_sparse_map_from_json(text)

    def test_save_and_load(self, tmp_path):
        A = SparseMatrix.from_dense(DENSE_4X3)
        pa = tmp_path / "A.json"
        save_matrix(A, pa)
        assert load_matrix(pa) == A
        S = OneSparseMap(3, 2, [1, 1], [-1, 1])
        ps = tmp_path / "S.json"
        save_one_sparse_map(S, ps)
        assert load_one_sparse_map(ps) == S
