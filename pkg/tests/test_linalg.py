import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from singular_ssm.linalg import (
    flip_matrix,
    lower_factor,
    lq_complete,
    ql_complete,
    qr_complete,
    qr_thin,
    solve_triangular,
)
from singular_ssm.utils.errors import DimensionMismatch, SingularTriangular


def random_shape(rng, high=12):
    a, b = sorted(rng.integers(1, high, size=2))
    return int(b), int(a)


class TestQrComplete:
    def test_identity(self):
        Q, R = qr_complete(np.eye(3))
        assert_allclose(Q, np.eye(3), atol=1e-15)
        assert_allclose(R, np.eye(3), atol=1e-15)

    def test_column_swap(self):
        M = np.array([[0.0], [2.0]])
        Q, R = qr_complete(M)
        assert_allclose(R, [[2.0], [0.0]], atol=1e-15)
        assert_allclose(np.abs(Q), [[0.0, 1.0], [1.0, 0.0]], atol=1e-15)
        assert_allclose(Q @ R, M, atol=1e-15)

    def test_random_reconstruction(self):
        rng = np.random.default_rng(0)
        M = rng.standard_normal((5, 3))
        Q, R = qr_complete(M)
        assert_allclose(Q.T @ Q, np.eye(5), atol=1e-12)
        assert_allclose(Q @ R, M, atol=1e-12)
        assert np.all(np.diagonal(R) >= 0)
        assert_array_equal(R, np.triu(R))

    def test_wide_rejected(self):
        with pytest.raises(DimensionMismatch):
            qr_complete(np.ones((2, 3)))

    def test_zero_columns(self):
        Q, R = qr_complete(np.zeros((3, 0)))
        assert_array_equal(Q, np.eye(3))
        assert R.shape == (3, 0)

    def test_deterministic(self):
        M = np.random.default_rng(5).standard_normal((6, 4))
        Q1, R1 = qr_complete(M)
        Q2, R2 = qr_complete(M.copy())
        assert_array_equal(Q1, Q2)
        assert_array_equal(R1, R2)


class TestQrThin:
    def test_stacked_identity(self):
        M = np.vstack([np.eye(2), np.zeros((2, 2))])
        Q, R = qr_thin(M)
        assert_allclose(Q, M, atol=1e-15)
        assert_allclose(R, np.eye(2), atol=1e-15)

    def test_hand_norm(self):
        Q, R = qr_thin(np.array([[3.0], [4.0]]))
        assert_allclose(Q, [[0.6], [0.8]], atol=1e-15)
        assert_allclose(R, [[5.0]], atol=1e-14)

    def test_random_reconstruction(self):
        M = np.random.default_rng(1).standard_normal((6, 2))
        Q, R = qr_thin(M)
        assert Q.shape == (6, 2) and R.shape == (2, 2)
        assert_allclose(Q.T @ Q, np.eye(2), atol=1e-12)
        assert_allclose(Q @ R, M, atol=1e-12)


class TestLqComplete:
    def test_identity(self):
        L, Q = lq_complete(np.eye(3))
        assert_allclose(L, np.eye(3), atol=1e-15)
        assert_allclose(Q, np.eye(3), atol=1e-15)

    def test_row_vector(self):
        M = np.array([[3.0, 4.0]])
        L, Q = lq_complete(M)
        assert_allclose(L, [[5.0, 0.0]], atol=1e-14)
        assert_allclose(L @ Q, M, atol=1e-14)
        assert_allclose(Q @ Q.T, np.eye(2), atol=1e-15)

    def test_random_reconstruction(self):
        M = np.random.default_rng(2).standard_normal((2, 5))
        L, Q = lq_complete(M)
        assert_allclose(L @ Q, M, atol=1e-12)
        assert_allclose(Q @ Q.T, np.eye(5), atol=1e-12)
        assert_array_equal(L, np.tril(L))

    def test_tall_rejected(self):
        with pytest.raises(DimensionMismatch):
            lq_complete(np.ones((3, 2)))


class TestQlComplete:
    def test_lower_triangular_input(self):
        M = np.array([[2.0, 0.0], [1.0, 3.0]])
        Q, L = ql_complete(M)
        assert_allclose(Q, np.eye(2), atol=1e-14)
        assert_allclose(L, M, atol=1e-14)

    def test_flip(self):
        Q, L = ql_complete(flip_matrix(2))
        assert_allclose(Q, flip_matrix(2), atol=1e-15)
        assert_allclose(L, np.eye(2), atol=1e-15)

    def test_random_bottom_aligned(self):
        M = np.random.default_rng(3).standard_normal((4, 2))
        Q, L = ql_complete(M)
        assert_allclose(Q @ L, M, atol=1e-12)
        assert_allclose(Q.T @ Q, np.eye(4), atol=1e-12)
        assert_array_equal(L[:2], 0.0)
        assert_array_equal(L[2:], np.tril(L[2:]))
        assert np.all(np.diagonal(L[2:]) >= 0)

    def test_same_path_as_flipped_qr(self):
        M = np.random.default_rng(4).standard_normal((5, 3))
        Q, L = ql_complete(M)
        Qr, R = qr_complete(M @ flip_matrix(3))
        assert_array_equal(Q, Qr[:, ::-1])
        assert_array_equal(L, R[::-1, ::-1])


class TestLowerFactor:
    @pytest.mark.parametrize("shape", [(4, 6), (4, 4), (5, 2), (3, 0)])
    def test_square_root(self, shape):
        M = np.random.default_rng(6).standard_normal(shape)
        L = lower_factor(M)
        assert L.shape == (shape[0], min(shape))
        assert_allclose(L @ L.T, M @ M.T, atol=1e-12)
        assert_array_equal(L, np.tril(L))
        assert np.all(np.diagonal(L) >= 0)

    def test_column_order_does_not_matter(self):
        S = np.array([[4.0, 2.0], [2.0, 3.0]])
        assert_allclose(lower_factor(np.linalg.cholesky(S) @ np.eye(2)[::-1]), np.linalg.cholesky(S), atol=1e-14)


class TestSolveTriangular:
    def test_identity(self):
        rhs = np.random.default_rng(7).standard_normal((3, 2))
        assert_allclose(solve_triangular(np.eye(3), rhs), rhs)

    def test_forward_substitution(self):
        T = np.array([[2.0, 0.0], [1.0, 1.0]])
        assert_allclose(solve_triangular(T, np.array([[2.0], [2.0]])), [[1.0], [1.0]])

    def test_transposed(self):
        T = np.array([[2.0, 0.0], [1.0, 1.0]])
        x = solve_triangular(T, np.array([3.0, 1.0]), trans=True)
        assert_allclose(T.T @ x, [3.0, 1.0])

    def test_zero_diagonal(self):
        T = np.array([[1.0, 0.0], [5.0, 0.0]])
        with pytest.raises(SingularTriangular) as info:
            solve_triangular(T, np.ones(2))
        assert info.value.index == 1

    def test_floor(self):
        T = np.diag([1.0, 1e-9])
        solve_triangular(T, np.ones(2))
        with pytest.raises(SingularTriangular):
            solve_triangular(T, np.ones(2), floor=1e-8)


class TestFlipMatrix:
    def test_small(self):
        assert_array_equal(flip_matrix(1), [[1.0]])
        assert_array_equal(flip_matrix(2), [[0.0, 1.0], [1.0, 0.0]])

    def test_reverses_diagonal(self):
        F = flip_matrix(3)
        assert_array_equal(F @ np.diag([1.0, 2.0, 3.0]) @ F, np.diag([3.0, 2.0, 1.0]))
        assert_array_equal(F @ F, np.eye(3))


class TestFactorizationProperties:
    def check_all(self, rng, dtype, tol, high=12):
        tall = rng.standard_normal(random_shape(rng, high)).astype(dtype)
        Q, R = qr_complete(tall)
        assert Q.dtype == dtype
        assert_allclose(Q @ R, tall, atol=tol)
        assert_allclose(Q.T @ Q, np.eye(Q.shape[0]), atol=tol)

        Q, L = ql_complete(tall)
        assert_allclose(Q @ L, tall, atol=tol)

        wide = tall.T.copy()
        L, Q = lq_complete(wide)
        assert_allclose(L @ Q, wide, atol=tol)
        assert_allclose(Q @ Q.T, np.eye(Q.shape[0]), atol=tol)

    def test_double(self):
        rng = np.random.default_rng(10)
        for _ in range(100):
            self.check_all(rng, np.float64, 1e-12)

    def test_single(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            self.check_all(rng, np.float32, 1e-5, high=8)

    @pytest.mark.slow
    def test_double_many(self):
        rng = np.random.default_rng(12)
        for _ in range(1000):
            self.check_all(rng, np.float64, 1e-12)
