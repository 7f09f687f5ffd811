"""
Exact rational conditioning, the extended-precision reference for ill-conditioned models.

Model entries are converted to Fractions (exactly, since every double is a
dyadic rational), the joint covariance is accumulated in rational arithmetic and
the observation covariance is inverted by Gauss-Jordan elimination. The only
rounding happens when the results are converted back to doubles.
"""

from fractions import Fraction

import numpy as np

from singular_ssm.reduction import StateSpaceModel
from singular_ssm.reference.batch import noise_to_joint_map
from singular_ssm.utils.errors import DimensionMismatch, SingularSSMError
from singular_ssm.utils.logging import get_logger

logger = get_logger()


def _to_fractions(a: np.ndarray) -> np.ndarray:
    out = np.empty(a.shape, dtype=object)
    for idx, value in np.ndenumerate(a):
        out[idx] = value if isinstance(value, Fraction) else Fraction(float(value))
    return out


def _rational_model(model: StateSpaceModel) -> StateSpaceModel:
    convert = lambda mats: tuple(_to_fractions(np.asarray(a)) for a in mats)
    return StateSpaceModel(
        n=model.n, ell=model.ell, r=model.r, T=model.T,
        Phi=convert(model.Phi), Qmat=convert(model.Qmat),
        Cmat=convert(model.Cmat), Fmat=convert(model.Fmat),
    )


def _solve_exact(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Solve A X = B over the rationals by Gauss-Jordan elimination."""
    k = A.shape[0]
    aug = np.concatenate([A, B], axis=1).astype(object)
    for col in range(k):
        pivot = next((row for row in range(col, k) if aug[row, col] != 0), None)
        if pivot is None:
            raise SingularSSMError(f"observation covariance is singular (column {col})")
        if pivot != col:
            aug[[col, pivot]] = aug[[pivot, col]]
        aug[col] = aug[col] / aug[col, col]
        for row in range(k):
            if row != col and aug[row, col] != 0:
                aug[row] = aug[row] - aug[row, col] * aug[col]
    return aug[:, k:]


def exact_condition(model: StateSpaceModel, observed: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Posterior mean and covariance of x_{0:T} given y_{0:T}, computed exactly.

    Args:
        model: State-space model (keep it small: the cost grows fast with T)
        observed: (T+1) x m observations

    Returns:
        (mean, cov) of the stacked states, rounded to double precision
    """
    observed = np.asarray(observed, dtype=np.float64)
    if observed.shape != (model.T + 1, model.m):
        raise DimensionMismatch(f"observations have shape {observed.shape}, expected {(model.T + 1, model.m)}")

    logger.debug(f"Exact conditioning: n={model.n}, m={model.m}, T={model.T}")
    mapping = noise_to_joint_map(_rational_model(model), dtype=object)
    nx = (model.T + 1) * model.n
    M_x, M_y = mapping[:nx], mapping[nx:]

    S_xy = M_x @ M_y.T
    S_yy = M_y @ M_y.T
    S_xx = M_x @ M_x.T

    y = _to_fractions(observed.reshape(-1))
    # S_yy^{-1} [y, S_yx] in one elimination
    solved = _solve_exact(S_yy, np.concatenate([y[:, None], S_xy.T], axis=1))
    mean = S_xy @ solved[:, 0]
    cov = S_xx - S_xy @ solved[:, 1:]

    to_float = np.vectorize(float, otypes=[np.float64])
    return to_float(mean), to_float(cov)
