"""
Householder QR-family factorizations with a fixed sign convention.

Every factorization here is a thin wrapper around LAPACK's Householder QR
(scipy.linalg.qr). After factorizing, rows of the triangular factor and the
matching columns of the orthogonal factor are rescaled so that the diagonal of
the triangular factor is nonnegative. This makes the output deterministic and
turns lower-triangular factors of covariances into canonical Cholesky factors.

Triangular factors are plain arrays whose entries on the wrong side of the
diagonal are written as exact zeros.
"""

import numpy as np
import scipy.linalg

from singular_ssm.utils.errors import DimensionMismatch, SingularTriangular


def _result_dtype(M: np.ndarray) -> np.dtype:
    return M.dtype if M.dtype in (np.float32, np.float64) else np.dtype(np.float64)


def _canonicalize_signs(Q: np.ndarray, R: np.ndarray) -> None:
    """Flip rows of R and columns of Q in place so that diag(R) >= 0."""
    k = min(R.shape)
    if k == 0:
        return
    signs = np.where(np.diagonal(R)[:k] < 0, -1, 1).astype(R.dtype)
    R[:k, :] *= signs[:, None]
    Q[:, :k] *= signs[None, :]


def flip_matrix(k: int, dtype=np.float64) -> np.ndarray:
    """
    Antidiagonal permutation F_k (ones on the antidiagonal, zeros elsewhere).

    Args:
        k: Number of rows and columns
        dtype: Floating-point type of the result

    Returns:
        k x k array with F_k F_k = I_k
    """
    if k < 0:
        raise DimensionMismatch(f"flip_matrix needs k >= 0, got {k}")
    return np.eye(k, dtype=dtype)[::-1].copy()


def qr_complete(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Complete QR decomposition M = QR of a tall matrix.

    Args:
        M: n x m array with n >= m

    Returns:
        Q: n x n orthogonal
        R: n x m upper triangular with nonnegative diagonal
    """
    M = np.asarray(M)
    n, m = M.shape
    if n < m:
        raise DimensionMismatch(f"qr_complete needs rows >= cols, got {n}x{m}")
    dtype = _result_dtype(M)
    if n == 0 or m == 0:
        return np.eye(n, dtype=dtype), np.zeros((n, m), dtype=dtype)

    Q, R = scipy.linalg.qr(M.astype(dtype, copy=False), mode="full", check_finite=False)
    R = np.triu(R)
    _canonicalize_signs(Q, R)
    return Q, R


def qr_thin(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Thin QR decomposition M = QR of a tall matrix.

    Args:
        M: n x m array with n >= m

    Returns:
        Q: n x m with orthonormal columns
        R: m x m upper triangular with nonnegative diagonal
    """
    M = np.asarray(M)
    n, m = M.shape
    if n < m:
        raise DimensionMismatch(f"qr_thin needs rows >= cols, got {n}x{m}")
    dtype = _result_dtype(M)
    if m == 0:
        return np.zeros((n, 0), dtype=dtype), np.zeros((0, 0), dtype=dtype)

    Q, R = scipy.linalg.qr(M.astype(dtype, copy=False), mode="economic", check_finite=False)
    R = np.triu(R)
    _canonicalize_signs(Q, R)
    return Q, R


def lq_complete(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Complete LQ decomposition M = LQ of a wide matrix (transpose, QR, transpose).

    Args:
        M: n x m array with m >= n

    Returns:
        L: n x m lower triangular with nonnegative diagonal
        Q: m x m orthogonal
    """
    M = np.asarray(M)
    n, m = M.shape
    if m < n:
        raise DimensionMismatch(f"lq_complete needs cols >= rows, got {n}x{m}")
    Q, R = qr_complete(M.T)
    return np.ascontiguousarray(R.T), np.ascontiguousarray(Q.T)


def ql_complete(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Complete QL decomposition M = QL of a tall matrix.

    Computed as a QR decomposition of M F_m followed by M = (Q F_n)(F_n R F_m).

    Args:
        M: n x m array with n >= m

    Returns:
        Q: n x n orthogonal
        L: n x m, zero except for its bottom m x m lower-triangular block
    """
    M = np.asarray(M)
    n, m = M.shape
    if n < m:
        raise DimensionMismatch(f"ql_complete needs rows >= cols, got {n}x{m}")
    Q, R = qr_complete(M[:, ::-1])
    return np.ascontiguousarray(Q[:, ::-1]), np.ascontiguousarray(R[::-1, ::-1])


def lower_factor(M: np.ndarray) -> np.ndarray:
    """
    Lower-trapezoidal square-root factor of M M* for a matrix of any shape.

    Args:
        M: k x s array

    Returns:
        k x min(k, s) lower-trapezoidal L with L L* = M M* and nonnegative diagonal
    """
    M = np.asarray(M)
    k, s = M.shape
    dtype = _result_dtype(M)
    q = min(k, s)
    if q == 0:
        return np.zeros((k, q), dtype=dtype)

    R = scipy.linalg.qr(M.T.astype(dtype, copy=False), mode="r", check_finite=False)[0]
    R = np.triu(R[:q, :])
    signs = np.where(np.diagonal(R) < 0, -1, 1).astype(dtype)
    R *= signs[:, None]
    return np.ascontiguousarray(R.T)


def solve_triangular(
    T: np.ndarray,
    rhs: np.ndarray,
    lower: bool = True,
    trans: bool = False,
    floor: float = 0.0,
) -> np.ndarray:
    """
    Solve T x = rhs (or T* x = rhs) by forward/backward substitution.

    Args:
        T: k x k triangular array
        rhs: Right-hand side with k rows (vector or k x p)
        lower: Whether T is lower triangular
        trans: Solve with T* instead of T
        floor: Diagonal magnitudes at or below this are treated as singular

    Returns:
        Solution with the shape of rhs

    Raises:
        SingularTriangular: a diagonal entry of T is at or below the floor
    """
    T = np.asarray(T)
    rhs = np.asarray(rhs)
    k = T.shape[0]
    if T.shape != (k, k) or rhs.shape[0] != k:
        raise DimensionMismatch(f"solve_triangular got T {T.shape} and rhs {rhs.shape}")
    if k == 0:
        return np.zeros(rhs.shape, dtype=np.result_type(T, rhs))

    diag = np.abs(np.diagonal(T))
    bad = np.flatnonzero(~(diag > floor))
    if bad.size:
        i = int(bad[0])
        raise SingularTriangular(f"diagonal entry {i} has magnitude {diag[i]:.3e} (floor {floor:.1e})", index=i)

    return scipy.linalg.solve_triangular(
        T, rhs, lower=lower, trans="T" if trans else "N", check_finite=False
    )
