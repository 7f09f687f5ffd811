"""
Dense batch oracle: the joint Gaussian of (x_{0:T}, y_{0:T}) and its
pseudoinverse conditional given the observations.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from singular_ssm.reduction import StateSpaceModel
from singular_ssm.utils.config import DEFAULT_TOLERANCES, Tolerances
from singular_ssm.utils.constants import JOINT_SIZE_LIMIT
from singular_ssm.utils.errors import DimensionMismatch, SizeLimit


@dataclass(frozen=True)
class DenseJointLaw:
    """Mean and covariance of the stacked vector (x_0, ..., x_T, y_0, ..., y_T)."""

    mean: np.ndarray
    cov: np.ndarray
    n: int
    m: int
    T: int

    @property
    def state_size(self) -> int:
        return (self.T + 1) * self.n

    def state_slice(self, t: int) -> slice:
        return slice(t * self.n, (t + 1) * self.n)

    def is_valid(self, tolerances: Tolerances = DEFAULT_TOLERANCES) -> bool:
        """Symmetric to symmetry_atol and PSD up to psd_rtol times the norm."""
        symmetric = np.max(np.abs(self.cov - self.cov.T), initial=0.0) <= tolerances.symmetry_atol
        eigvals = np.linalg.eigvalsh(self.cov) if self.cov.size else np.zeros(0)
        scale = np.max(np.abs(eigvals), initial=0.0)
        return bool(symmetric and np.all(eigvals >= -tolerances.psd_rtol * scale))


@dataclass(frozen=True)
class BatchPosterior:
    """Posterior of the stacked states given all observations."""

    mean: np.ndarray
    cov: np.ndarray
    logdensity: float
    n: int

    def state(self, t: int) -> tuple[np.ndarray, np.ndarray]:
        """Mean and covariance of x_t."""
        s = slice(t * self.n, (t + 1) * self.n)
        return self.mean[s], self.cov[s, s]


def noise_to_joint_map(model: StateSpaceModel, dtype=None) -> np.ndarray:
    """
    Linear map from the stacked noises (u_{0:T}, w_{0:T}) to (x_{0:T}, y_{0:T}).

    Built by forward accumulation of x_t = Phi_t x_{t-1} + Q_t u_t.
    With dtype=object the map carries whatever scalar type the model holds.
    """
    n, m, r, T = model.n, model.m, model.r, model.T
    dtype = dtype if dtype is not None else np.float64
    nx, nu = (T + 1) * n, (T + 1) * n
    mapping = np.zeros(((T + 1) * (n + m), (T + 1) * (n + r)), dtype=dtype)

    for t in range(T + 1):
        rows = slice(t * n, (t + 1) * n)
        if t > 0:
            prev = slice((t - 1) * n, t * n)
            mapping[rows, :nu] = model.Phi[t] @ mapping[prev, :nu]
        mapping[rows, t * n:(t + 1) * n] += model.Qmat[t]

    for t in range(T + 1):
        rows = slice(nx + t * m, nx + (t + 1) * m)
        mapping[rows, :nu] = model.Cmat[t] @ mapping[t * n:(t + 1) * n, :nu]
        mapping[rows, nu + t * r:nu + (t + 1) * r] = model.Fmat[t]

    return mapping


def build_joint(model: StateSpaceModel, size_limit: int = JOINT_SIZE_LIMIT) -> DenseJointLaw:
    """
    Exact mean and covariance of the stacked states and observations.

    Args:
        model: State-space model
        size_limit: Largest admissible stacked dimension

    Returns:
        DenseJointLaw with zero mean

    Raises:
        SizeLimit: (T+1)(n + ell + r) exceeds size_limit
    """
    size = (model.T + 1) * (model.n + model.m)
    if size > size_limit:
        raise SizeLimit(f"joint dimension {size} exceeds the limit {size_limit}")

    mapping = noise_to_joint_map(model.astype(np.float64))
    cov = mapping @ mapping.T
    cov = 0.5 * (cov + cov.T)
    return DenseJointLaw(mean=np.zeros(size), cov=cov, n=model.n, m=model.m, T=model.T)


def batch_condition(
    joint: DenseJointLaw, observed: np.ndarray, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> BatchPosterior:
    """
    Condition the stacked states on all observations.

    Args:
        joint: Dense joint law
        observed: (T+1) x m observations (or their flattening)
        tolerances: pinv_rtol thresholds the eigenvalues of the observation covariance

    Returns:
        BatchPosterior with the pseudoinverse conditional and the log-density of y_{0:T}
    """
    nx = joint.state_size
    y = np.asarray(observed, dtype=np.float64).reshape(-1)
    if y.shape[0] != joint.mean.shape[0] - nx:
        raise DimensionMismatch(f"expected {joint.mean.shape[0] - nx} observed values, got {y.shape[0]}")

    mu_x, mu_y = joint.mean[:nx], joint.mean[nx:]
    S_xx, S_xy, S_yy = joint.cov[:nx, :nx], joint.cov[:nx, nx:], joint.cov[nx:, nx:]

    S_yy_pinv = scipy.linalg.pinvh(S_yy, atol=0.0, rtol=tolerances.pinv_rtol)
    gain = S_xy @ S_yy_pinv
    mean = mu_x + gain @ (y - mu_y)
    cov = S_xx - gain @ S_xy.T
    cov = 0.5 * (cov + cov.T)

    logdensity = gaussian_logdensity(y - mu_y, S_yy) if y.size else 0.0
    return BatchPosterior(mean=mean, cov=cov, logdensity=logdensity, n=joint.n)


def gaussian_logdensity(residual: np.ndarray, cov: np.ndarray) -> float:
    """log N(residual; 0, cov) through a Cholesky factor of cov, without an eigenvalue cut-off."""
    factor, lower = scipy.linalg.cho_factor(cov, lower=True)
    quad = float(residual @ scipy.linalg.cho_solve((factor, lower), residual))
    log_det = 2.0 * float(np.sum(np.log(np.diagonal(factor))))
    return -0.5 * (residual.shape[0] * np.log(2.0 * np.pi) + log_det + quad)
