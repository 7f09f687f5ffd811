"""
Conventional covariance-form Kalman filter and Rauch-Tung-Striebel smoother on
the reduced model.

Same recursions as singular_ssm.estimation, but with explicit covariances and
linear solves through a Cholesky or LU decomposition. Deliberately fragile:
breakdown is reported on the output instead of raised.
"""

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from singular_ssm.estimation import EstimationOutput
from singular_ssm.reduction import ReducedModel, transform_observations
from singular_ssm.utils.errors import DimensionMismatch, NumericalFailure
from singular_ssm.utils.logging import get_logger

logger = get_logger()

SOLVERS = ("cholesky", "lu")


@dataclass(frozen=True)
class DenseGaussian:
    """Gaussian in covariance form."""

    mean: np.ndarray
    cov: np.ndarray

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @classmethod
    def nan(cls, k: int) -> "DenseGaussian":
        return cls(np.full(k, np.nan), np.full((k, k), np.nan))

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.mean)) and np.all(np.isfinite(self.cov)))


class _Solver:
    """S^{-1} B and log det S through the selected decomposition."""

    def __init__(self, S: np.ndarray, method: str):
        self.method = method
        if method == "cholesky":
            self.factor = scipy.linalg.cho_factor(S, lower=True, check_finite=False)
        else:
            self.factor = scipy.linalg.lu_factor(S, check_finite=False)

    def solve(self, B: np.ndarray) -> np.ndarray:
        if self.method == "cholesky":
            return scipy.linalg.cho_solve(self.factor, B, check_finite=False)
        return scipy.linalg.lu_solve(self.factor, B, check_finite=False)

    def logdet(self) -> float:
        diag = np.diagonal(self.factor[0])
        scale = 2.0 if self.method == "cholesky" else 1.0
        return float(scale * np.sum(np.log(np.abs(diag))))


def _update(mean, cov, lin, offset, noise, observed, method):
    """Condition N(mean, cov) on observed = lin x + offset + noise; returns mean, cov, loglik."""
    if lin.shape[0] == 0:
        return mean, cov, 0.0
    S = lin @ cov @ lin.T + noise @ noise.T
    solver = _Solver(S, method)
    gain = solver.solve(lin @ cov).T
    innovation = observed - lin @ mean - offset
    mean = mean + gain @ innovation
    cov = cov - gain @ S @ gain.T
    quad = float(innovation @ solver.solve(innovation))
    loglik = -0.5 * (lin.shape[0] * np.log(2.0 * np.pi) + solver.logdet() + quad)
    return mean, cov, loglik


def conventional_reduced_smoother(red: ReducedModel, obs: np.ndarray, solver: str = "cholesky") -> EstimationOutput:
    """
    Covariance-form filter and RTS smoother on the reduced model.

    Args:
        red: Reduced model
        obs: (T+1) x (ell+r) raw observations
        solver: "cholesky" or "lu" for every linear solve

    Returns:
        EstimationOutput with DenseGaussian filtering and smoothing marginals over x^u_t.
        On breakdown, marginals are NaN from the failing step on and failure names the step.
    """
    if solver not in SOLVERS:
        raise ValueError(f"solver must be one of {SOLVERS}, got '{solver}'")
    obs = np.asarray(obs, dtype=np.float64)
    if obs.shape != (red.T + 1, red.ell + red.r):
        raise DimensionMismatch(f"observations have shape {obs.shape}, expected {(red.T + 1, red.ell + red.r)}")

    y_c, y_u = transform_observations(red, obs)
    k = red.reduced_dim
    filtered, increments, backward = [], [], []
    failure = None

    with warnings.catch_warnings(), np.errstate(all="ignore"):
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        try:
            for t in range(red.T + 1):
                step = red[t]
                if t == 0:
                    inc_c = 0.0
                    if red.ell:
                        cons = _Solver(step.cons_noise @ step.cons_noise.T, solver)
                        quad = float(y_c[0] @ cons.solve(y_c[0]))
                        inc_c = -0.5 * (red.ell * np.log(2.0 * np.pi) + cons.logdet() + quad)
                    mean_pred = step.gain @ y_c[0]
                    cov_pred = step.trans_noise @ step.trans_noise.T
                else:
                    mean, cov = filtered[-1].mean, filtered[-1].cov
                    mean, cov, inc_c = _update(mean, cov, step.lam1, step.lam2 @ y_c[t - 1],
                                               step.cons_noise, y_c[t], solver)
                    mean_pred = step.psi1 @ mean + step.psi2 @ y_c[t - 1] + step.gain @ y_c[t]
                    cov_pred = step.psi1 @ cov @ step.psi1.T + step.trans_noise @ step.trans_noise.T
                    smoother_gain = _Solver(cov_pred, solver).solve(step.psi1 @ cov).T
                    backward.append((mean, cov, mean_pred, cov_pred, smoother_gain))

                mean, cov, inc_u = _update(mean_pred, cov_pred, step.obs_lin, step.obs_offset_map @ y_c[t],
                                           step.obs_noise, y_u[t], solver)
                current = DenseGaussian(mean, cov)
                if not current.is_finite():
                    raise NumericalFailure(f"non-finite filtering moments at step {t}", step=t)
                filtered.append(current)
                increments.append((float(inc_c), float(inc_u)))

            smoothed = [None] * (red.T + 1)
            smoothed[-1] = filtered[-1]
            for t in range(red.T, 0, -1):
                mean, cov, mean_pred, cov_pred, smoother_gain = backward[t - 1]
                later = smoothed[t]
                smoothed[t - 1] = DenseGaussian(
                    mean + smoother_gain @ (later.mean - mean_pred),
                    cov + smoother_gain @ (later.cov - cov_pred) @ smoother_gain.T,
                )

        except (np.linalg.LinAlgError, NumericalFailure, ValueError) as e:
            failed_at = len(filtered)
            failure = f"{solver} smoother broke down at step {failed_at}: {e}"
            logger.warning(failure)
            filtered += [DenseGaussian.nan(k) for _ in range(red.T + 1 - len(filtered))]
            increments += [(np.nan, np.nan) for _ in range(red.T + 1 - len(increments))]
            smoothed = [DenseGaussian.nan(k) for _ in range(red.T + 1)]

    if failure is None and not all(g.is_finite() for g in smoothed):
        failure = f"{solver} smoother produced non-finite smoothing moments"
        logger.warning(failure)

    return EstimationOutput(
        filter_marginals=filtered,
        loglik_increments=increments,
        smooth_marginals=smoothed,
        failure=failure,
    )


def reconstruct_dense(red: ReducedModel, marginals: list, obs: np.ndarray) -> list:
    """Full-state covariance-form Gaussians x_t = W_u x^u_t + W_c S_c^{-1} y^c_t."""
    y_c, _ = transform_observations(red, np.asarray(obs, dtype=np.float64))
    out = []
    with np.errstate(all="ignore"):
        for t, marginal in enumerate(marginals):
            step = red[t]
            out.append(DenseGaussian(
                step.recon_w @ marginal.mean + step.recon_offset_map @ y_c[t],
                step.recon_w @ marginal.cov @ step.recon_w.T,
            ))
    return out
