"""
Online stage: robust filtering, smoothing and marginal likelihood on a reduced model.

Every step reduces to the two conditioning primitives of singular_ssm.gaussian:
bayes_update for the constrained and unconstrained observations, and
marginalize_and_condition for the transition (which also yields the backward
kernel consumed by the smoother).
"""

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from singular_ssm.gaussian import (
    AffineGaussianMap,
    CholGaussian,
    bayes_update,
    gaussian_logpdf,
    marginalize,
    marginalize_and_condition,
)
from singular_ssm.reduction import ReducedModel, StateSpaceModel, reconstruct_state, transform_observations
from singular_ssm.utils.config import DEFAULT_TOLERANCES, Tolerances
from singular_ssm.utils.errors import DimensionMismatch, SingularTriangular
from singular_ssm.utils.logging import get_logger

logger = get_logger()


@dataclass(frozen=True)
class FilterState:
    """Filtering distribution of x^u_t and the log marginal likelihood accumulated so far."""

    t: int
    dist: CholGaussian
    loglik: float


@dataclass(frozen=True)
class EstimationOutput:
    """Result of an estimation run.

    backward_kernels[t - 1] maps x_t to the law of x_{t-1} (length T when stored).
    loglik_increments[t] is (log p(y^c_t | past), log p(y^u_t | y^c_t, past)).
    failure is set by baselines that report numerical breakdown instead of raising.
    """

    filter_marginals: list
    loglik_increments: list
    backward_kernels: Optional[list] = None
    smooth_marginals: Optional[list] = None
    reconstructed: Optional[list] = None
    failure: Optional[str] = None

    @property
    def T(self) -> int:
        return len(self.filter_marginals) - 1

    @property
    def loglik(self) -> float:
        """Total log marginal likelihood; t ascending, constrained before unconstrained."""
        total = 0.0
        for inc_c, inc_u in self.loglik_increments:
            total += inc_c
            total += inc_u
        return total

    @property
    def final_state(self) -> FilterState:
        return FilterState(t=self.T, dist=self.filter_marginals[-1], loglik=self.loglik)


def _update(prior: CholGaussian, kernel: AffineGaussianMap, observed: np.ndarray, floor: float):
    if kernel.target_dim == 0:
        return prior, 0.0
    return bayes_update(prior, kernel, observed, floor=floor)


def filter(
    red: ReducedModel,
    obs: np.ndarray,
    store_backward: bool = False,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> EstimationOutput:
    """
    Robust Kalman filter on the reduced model, with marginal likelihood.

    Args:
        red: Reduced model
        obs: (T+1) x (ell+r) raw observations
        store_backward: Keep the backward kernels (needed by smooth)
        tolerances: triangular_floor applies to innovation factors

    Returns:
        EstimationOutput with filtering marginals over x^u_t and likelihood increments

    Raises:
        SingularTriangular: tagged with the step whose innovation factor degenerated
    """
    obs = np.asarray(obs)
    if obs.shape != (red.T + 1, red.ell + red.r):
        raise DimensionMismatch(f"observations have shape {obs.shape}, expected {(red.T + 1, red.ell + red.r)}")

    floor = tolerances.triangular_floor
    y_c, y_u = transform_observations(red, obs)
    dtype = y_c.dtype

    marginals, increments = [], []
    kernels = [] if store_backward else None

    for t in range(red.T + 1):
        step = red[t]
        try:
            if t == 0:
                cons = CholGaussian(np.zeros(red.ell, dtype=dtype), step.cons_noise)
                inc_c = gaussian_logpdf(cons, y_c[0], floor=floor)
                predicted = CholGaussian(step.gain @ y_c[0], step.trans_noise)
            else:
                # Step 1: condition x^u_{t-1} on the constraint y^c_t
                constraint = AffineGaussianMap(step.lam1, step.lam2 @ y_c[t - 1], step.cons_noise)
                conditioned, inc_c = _update(marginals[-1], constraint, y_c[t], floor)

                # Step 2: predict x^u_t; the backward kernel comes for free
                transition = AffineGaussianMap(
                    step.psi1, step.psi2 @ y_c[t - 1] + step.gain @ y_c[t], step.trans_noise
                )
                result = marginalize_and_condition(conditioned, transition, floor=floor)
                predicted = result.marginal
                if store_backward:
                    kernels.append(result.backward)

            # Step 3: condition x^u_t on the noisy observation y^u_t
            likelihood = AffineGaussianMap(step.obs_lin, step.obs_offset_map @ y_c[t], step.obs_noise)
            filtered, inc_u = _update(predicted, likelihood, y_u[t], floor)

        except SingularTriangular as e:
            logger.error(f"Filter failed at step {t}: {e}")
            raise e.at_step(t) from e

        marginals.append(filtered)
        increments.append((float(inc_c), float(inc_u)))
        logger.debug(f"Filter step {t}: loglik increments {inc_c:.6g}, {inc_u:.6g}")

    out = EstimationOutput(
        filter_marginals=marginals,
        loglik_increments=increments,
        backward_kernels=kernels,
    )
    logger.debug(f"Filter finished: T={red.T}, loglik={out.loglik:.10g}")
    return out


def smooth(red: ReducedModel | StateSpaceModel, out: EstimationOutput) -> EstimationOutput:
    """
    Fixed-interval smoother by backward marginalization through stored kernels.

    Args:
        red: Model the output was computed on (reduced, or the original for unreduced_robust_filter output)
        out: Filter output with backward kernels

    Returns:
        Copy of out with smooth_marginals
    """
    if out.backward_kernels is None or len(out.backward_kernels) != out.T:
        raise DimensionMismatch("smoothing needs the backward kernels of every step (store_backward=True)")
    if out.T != red.T:
        raise DimensionMismatch(f"output covers T={out.T}, model has T={red.T}")

    smoothed = [None] * (out.T + 1)
    smoothed[-1] = out.filter_marginals[-1]
    for t in range(out.T, 0, -1):
        smoothed[t - 1] = marginalize(out.backward_kernels[t - 1], smoothed[t])

    return replace(out, smooth_marginals=smoothed)


def reconstruct_all(red: ReducedModel, out: EstimationOutput, obs: np.ndarray) -> EstimationOutput:
    """
    Full-state marginals from the smoothing (or, failing that, filtering) marginals.

    Args:
        red: Reduced model
        out: Estimation output
        obs: Raw observations used for the run

    Returns:
        Copy of out with reconstructed full-state Gaussians of rank n - ell
    """
    marginals = out.smooth_marginals if out.smooth_marginals is not None else out.filter_marginals
    y_c, _ = transform_observations(red, np.asarray(obs))
    reconstructed = [reconstruct_state(red, t, marginal, y_c[t]) for t, marginal in enumerate(marginals)]
    return replace(out, reconstructed=reconstructed)


def sample_posterior(out: EstimationOutput, rng: np.random.Generator, num_samples: int = 1) -> np.ndarray:
    """
    Draw trajectories of x^u_{0:T} from the posterior.

    Draws x^u_T from the last filtering marginal, then walks the backward kernels
    with fresh standard-normal noise.

    Args:
        out: Filter output with backward kernels
        rng: Random generator
        num_samples: Number of trajectories

    Returns:
        Array of shape (num_samples, T+1, n-ell)
    """
    if out.backward_kernels is None or len(out.backward_kernels) != out.T:
        raise DimensionMismatch("sampling needs the backward kernels of every step (store_backward=True)")

    last = out.filter_marginals[-1]
    samples = np.empty((num_samples, out.T + 1, last.dim), dtype=last.mean.dtype)

    def draw(dist_mean, factor):
        noise = rng.standard_normal((num_samples, factor.shape[1]))
        return dist_mean + noise @ factor.T

    samples[:, -1] = draw(last.mean, last.cov_factor)
    for t in range(out.T, 0, -1):
        kernel = out.backward_kernels[t - 1]
        means = samples[:, t] @ kernel.lin.T + kernel.offset
        samples[:, t - 1] = draw(means, kernel.noise_factor)
    return samples
