import numpy as np

from singular_ssm.reduction import StateSpaceModel
from singular_ssm.utils.constants import STREAM_OBSERVATION_NOISE, STREAM_PROCESS_NOISE
from singular_ssm.utils.logging import get_logger
from singular_ssm.utils.rng import standard_normal

logger = get_logger()


def simulate(model: StateSpaceModel, seed: int, zero_noise: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """
    Draw a state trajectory and its observations.

    u_t and w_t come from the counter-based generator keyed by
    (seed, t, stream), so a step's noise does not depend on the others.

    Args:
        model: State-space model
        seed: Noise seed
        zero_noise: Set u_t = w_t = 0, giving x_t = Phi_t x_{t-1} = 0 and y_t = 0

    Returns:
        (x, y) of shapes (T+1, n) and (T+1, ell+r), in the model's dtype
    """
    dtype = model.dtype
    x = np.zeros((model.T + 1, model.n), dtype=dtype)
    y = np.zeros((model.T + 1, model.m), dtype=dtype)

    state = np.zeros(model.n, dtype=dtype)
    for t in range(model.T + 1):
        if zero_noise:
            u = np.zeros(model.n, dtype=dtype)
            w = np.zeros(model.r, dtype=dtype)
        else:
            u = standard_normal(seed, t, STREAM_PROCESS_NOISE, model.n, dtype=dtype)
            w = standard_normal(seed, t, STREAM_OBSERVATION_NOISE, model.r, dtype=dtype)
        state = model.Phi[t] @ state + model.Qmat[t] @ u
        x[t] = state
        y[t] = model.Cmat[t] @ state + model.Fmat[t] @ w

    logger.debug(f"Simulated T={model.T} steps with seed {seed} (zero_noise={zero_noise})")
    return x, y
