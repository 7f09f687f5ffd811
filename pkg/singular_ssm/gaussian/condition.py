"""
Numerically robust Gaussian conditioning on square-root factors.

No covariance product LL* or BB* is formed anywhere in this module: marginals
and conditionals come from LQ decompositions of stacked factors and from
triangular solves.
"""

import math

import numpy as np

from singular_ssm.gaussian.types import AffineGaussianMap, CholGaussian, ConditioningResult
from singular_ssm.linalg import lower_factor, lq_complete, solve_triangular
from singular_ssm.utils.errors import DimensionMismatch

_LOG_2PI = math.log(2.0 * math.pi)


def _check_pair(prior: CholGaussian, kernel: AffineGaussianMap) -> None:
    if kernel.source_dim != prior.dim:
        raise DimensionMismatch(f"map expects a {kernel.source_dim}-dim input, prior has dim {prior.dim}")


def marginalize_and_condition(
    prior: CholGaussian, kernel: AffineGaussianMap, floor: float = 0.0
) -> ConditioningResult:
    """
    Marginal p(y) and backward kernel p(x | y) for x ~ prior, y | x ~ kernel.

    The joint factor [[A L, B], [L, 0]] is LQ-decomposed into
    [[L1, 0], [L*, L2]] (orthogonal factor discarded), then K solves K L1 = L*.

    Args:
        prior: Gaussian over x with a square factor
        kernel: Affine Gaussian map x -> y
        floor: Diagonal floor of the triangular solve against L1

    Returns:
        ConditioningResult with marginal N(Am + b, L1 L1*) and backward kernel
        y -> N(m - K(Am + b - y), L2 L2*)

    Raises:
        SingularTriangular: L1 has a diagonal entry at or below the floor
    """
    _check_pair(prior, kernel)
    if not prior.is_square:
        raise DimensionMismatch(f"conditioning needs a square prior factor, got {prior.cov_factor.shape}")

    A, b, B = kernel.lin, kernel.offset, kernel.noise_factor
    m, L = prior.mean, prior.cov_factor
    j, k, p = A.shape[0], A.shape[1], B.shape[1]
    dtype = np.result_type(L, A, B)

    # Zero columns keep the block wide enough for a complete LQ without changing its Gram matrix
    width = max(k + p, j + k)
    joint = np.zeros((j + k, width), dtype=dtype)
    joint[:j, :k] = A @ L
    joint[:j, k:k + p] = B
    joint[j:, :k] = L

    lower, _ = lq_complete(joint)
    L1 = lower[:j, :j]
    L_star = lower[j:, :j]
    L2 = lower[j:, j:j + k]

    # K L1 = L*  <=>  L1* K* = L*
    gain = solve_triangular(L1, L_star.T, lower=True, trans=True, floor=floor).T

    predicted = A @ m + b
    marginal = CholGaussian(predicted, L1)
    backward = AffineGaussianMap(gain, m - gain @ predicted, L2)
    return ConditioningResult(marginal=marginal, backward=backward)


def bayes_update(
    prior: CholGaussian,
    kernel: AffineGaussianMap,
    observed: np.ndarray,
    floor: float = 0.0,
    allow_noise_free: bool = False,
) -> tuple[CholGaussian, float]:
    """
    Posterior p(x | y = observed) and evidence log p(y = observed).

    Args:
        prior: Gaussian over x with a square factor
        kernel: Affine Gaussian map x -> y
        observed: Realization of y
        floor: Diagonal floor of the triangular solves
        allow_noise_free: Accept a map without noise columns (p = 0)

    Returns:
        (posterior, log_evidence)
    """
    if kernel.noise_factor.shape[1] == 0 and kernel.target_dim > 0 and not allow_noise_free:
        raise DimensionMismatch("bayes_update needs a noisy observation map (p > 0)")

    observed = np.asarray(observed)
    if observed.shape != (kernel.target_dim,):
        raise DimensionMismatch(f"observation has shape {observed.shape}, map targets {kernel.target_dim}")

    result = marginalize_and_condition(prior, kernel, floor=floor)
    posterior = result.backward.evaluate(observed)
    log_evidence = gaussian_logpdf(result.marginal, observed, floor=floor)
    return posterior, log_evidence


def marginalize(kernel: AffineGaussianMap, dist: CholGaussian) -> CholGaussian:
    """
    Push a Gaussian through an affine Gaussian map.

    Args:
        kernel: Affine Gaussian map x -> y
        dist: Gaussian over x, factor may be rank deficient

    Returns:
        N(A m + b, factor of A LL* A* + BB*) from the LQ of [A L | B]
    """
    _check_pair(dist, kernel)
    stacked = np.concatenate([kernel.lin @ dist.cov_factor, kernel.noise_factor], axis=1)
    return CholGaussian(kernel.lin @ dist.mean + kernel.offset, lower_factor(stacked))


def gaussian_logpdf(dist: CholGaussian, point: np.ndarray, floor: float = 0.0) -> float:
    """
    Log-density of a Gaussian with a square triangular factor.

    Args:
        dist: Gaussian with square lower-triangular factor
        point: Evaluation point
        floor: Diagonal floor of the forward substitution

    Returns:
        -(k/2) log(2 pi) - sum log|diag L| - 0.5 ||L^-1 (point - mean)||^2
    """
    if not dist.is_square:
        raise DimensionMismatch(f"logpdf needs a square factor, got {dist.cov_factor.shape}")
    k = dist.dim
    if k == 0:
        return 0.0
    residual = solve_triangular(dist.cov_factor, np.asarray(point) - dist.mean, lower=True, floor=floor)
    log_det = np.sum(np.log(np.abs(np.diagonal(dist.cov_factor))))
    return float(-0.5 * k * _LOG_2PI - log_det - 0.5 * np.dot(residual, residual))
