"""
Model generators for the benchmarks.
"""

import numpy as np

from singular_ssm.reduction import StateSpaceModel
from singular_ssm.utils.constants import STREAM_PARAMETERS
from singular_ssm.utils.errors import DimensionMismatch
from singular_ssm.utils.rng import keyed_generator


def random_model(n: int, ell: int, r: int, T: int, seed: int, dtype=np.float64) -> StateSpaceModel:
    """
    Time-varying model with independent standard-normal parameters.

    Phi_t is scaled by 1/sqrt(n) so that its spectral radius stays near one and
    trajectories remain finite in single precision; every other entry of Q_t,
    C_t and F_t is standard normal. Parameters of step t are drawn from the
    generator keyed by (seed, t, STREAM_PARAMETERS).

    Args:
        n: State dimension
        ell: Noise-free observation dimension
        r: Noisy observation dimension
        T: Last time index
        seed: Parameter seed
        dtype: Floating-point type of the matrices

    Returns:
        StateSpaceModel
    """
    if min(n, ell, r, T) < 0 or ell + r > n:
        raise DimensionMismatch(f"invalid dimensions n={n}, ell={ell}, r={r}, T={T}")

    m = ell + r
    mats = {"Phi": [], "Qmat": [], "Cmat": [], "Fmat": []}
    for t in range(T + 1):
        rng = keyed_generator(seed, t, STREAM_PARAMETERS)
        mats["Phi"].append(rng.standard_normal((n, n)) / np.sqrt(max(n, 1)))
        mats["Qmat"].append(rng.standard_normal((n, n)))
        mats["Cmat"].append(rng.standard_normal((m, n)))
        mats["Fmat"].append(rng.standard_normal((m, r)))

    cast = {name: tuple(a.astype(dtype) for a in mats[name]) for name in mats}
    return StateSpaceModel(n=n, ell=ell, r=r, T=T, seed=seed, **cast)


def hilbert_matrix(n: int) -> np.ndarray:
    """H[i][j] = 1 / (i + j + 1) with zero-based indices."""
    idx = np.arange(n)
    return 1.0 / (idx[:, None] + idx[None, :] + 1.0)


def hilbert_model(n: int, ell: int, T: int) -> StateSpaceModel:
    """
    Random walk with Hilbert-matrix process noise and exact observations of the first ell states.

    Phi_t = I_n, Q_t = H_n, C_t = (I_ell, 0), r = 0.
    """
    if not 0 <= ell <= n:
        raise DimensionMismatch(f"need 0 <= ell <= n, got ell={ell}, n={n}")
    C = np.eye(ell, n)
    return StateSpaceModel.time_invariant(
        Phi=np.eye(n), Qmat=hilbert_matrix(n), Cmat=C, Fmat=np.zeros((ell, 0)), T=T, ell=ell
    )
