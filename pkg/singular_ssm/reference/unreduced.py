import numpy as np

from singular_ssm.estimation import EstimationOutput
from singular_ssm.gaussian import AffineGaussianMap, CholGaussian, bayes_update, marginalize_and_condition
from singular_ssm.linalg import lower_factor
from singular_ssm.reduction import StateSpaceModel
from singular_ssm.utils.config import DEFAULT_TOLERANCES, Tolerances
from singular_ssm.utils.errors import DimensionMismatch, SingularTriangular
from singular_ssm.utils.logging import get_logger

logger = get_logger()


def unreduced_robust_filter(
    model: StateSpaceModel,
    obs: np.ndarray,
    store_backward: bool = False,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> EstimationOutput:
    """
    Square-root Kalman filter on the full n-dimensional state, without reduction.

    The whole observation y_t is treated as one block, so each likelihood
    increment is stored in the second slot of loglik_increments. Noise-free
    directions are tolerated as long as the innovation factors stay invertible.

    Args:
        model: Original state-space model
        obs: (T+1) x (ell+r) observations
        store_backward: Keep backward kernels so that estimation.smooth applies
        tolerances: triangular_floor applies to innovation factors

    Returns:
        EstimationOutput over x_t

    Raises:
        SingularTriangular: tagged with the failing step
    """
    obs = np.asarray(obs)
    if obs.shape != (model.T + 1, model.m):
        raise DimensionMismatch(f"observations have shape {obs.shape}, expected {(model.T + 1, model.m)}")

    floor = tolerances.triangular_floor
    dtype = model.dtype
    zeros_n, zeros_m = np.zeros(model.n, dtype=dtype), np.zeros(model.m, dtype=dtype)

    marginals, increments = [], []
    kernels = [] if store_backward else None

    for t in range(model.T + 1):
        try:
            if t == 0:
                predicted = CholGaussian(zeros_n, lower_factor(model.Qmat[0]))
            else:
                transition = AffineGaussianMap(model.Phi[t], zeros_n, model.Qmat[t])
                result = marginalize_and_condition(marginals[-1], transition, floor=floor)
                predicted = result.marginal
                if store_backward:
                    kernels.append(result.backward)

            likelihood = AffineGaussianMap(model.Cmat[t], zeros_m, model.Fmat[t])
            filtered, inc = bayes_update(predicted, likelihood, obs[t], floor=floor, allow_noise_free=True)

        except SingularTriangular as e:
            logger.error(f"Unreduced filter failed at step {t}: {e}")
            raise e.at_step(t) from e

        marginals.append(filtered)
        increments.append((0.0, float(inc)))

    return EstimationOutput(filter_marginals=marginals, loglik_increments=increments, backward_kernels=kernels)
