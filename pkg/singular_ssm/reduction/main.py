"""
Offline model reduction.

Transforms a state-space model with ell noise-free observation directions into
an (n - ell)-dimensional model with nonsingular observation noise, plus the
maps that reconstruct the full state. Nothing here touches observed data.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from singular_ssm.gaussian import CholGaussian
from singular_ssm.linalg import lower_factor, lq_complete, ql_complete, solve_triangular
from singular_ssm.reduction.model import StateSpaceModel
from singular_ssm.utils.config import DEFAULT_TOLERANCES, Tolerances
from singular_ssm.utils.errors import DimensionMismatch, RankDeficient, SingularTriangular
from singular_ssm.utils.logging import get_logger

logger = get_logger()


@dataclass(frozen=True)
class OneStepReduction:
    """Factors of the one-step reduction of x = Phi z + Q u, y = C x + F w.

    F = [Vu Vc] [Lu; 0]
    Vc* C = [Sc 0] [Wc*; Wu*]
    [Wc* Q; Wu* Q] = [[Zc, 0], [Zstar, Zu]] [Uc*; Uu*]
    G Zc = Zstar
    """

    Vu: np.ndarray
    Vc: np.ndarray
    Lu: np.ndarray
    Wc: np.ndarray
    Wu: np.ndarray
    Sc: np.ndarray
    Zc: np.ndarray
    Zu: np.ndarray
    Zstar: np.ndarray
    G: np.ndarray
    Uc: np.ndarray
    Uu: np.ndarray


@dataclass(frozen=True)
class ReducedStep:
    """Per-step matrices of the reduced model.

    Transition of the unconstrained state:
        x^u_0 = gain y^c_0 + trans_noise u^u_0
        x^u_t = psi1 x^u_{t-1} + psi2 y^c_{t-1} + gain y^c_t + trans_noise u^u_t
    Constrained observation:
        y^c_0 = cons_noise u^c_0
        y^c_t = lam1 x^u_{t-1} + lam2 y^c_{t-1} + cons_noise u^c_t
    Unconstrained observation:
        y^u_t = obs_lin x^u_t + obs_offset_map y^c_t + obs_noise w_t
    Reconstruction:
        x_t = recon_w x^u_t + recon_offset_map y^c_t

    psi1, psi2, lam1 and lam2 are None at t = 0.
    """

    gain: np.ndarray
    trans_noise: np.ndarray
    cons_noise: np.ndarray
    obs_lin: np.ndarray
    obs_offset_map: np.ndarray
    obs_noise: np.ndarray
    recon_w: np.ndarray
    recon_offset_map: np.ndarray
    Vu: np.ndarray
    Vc: np.ndarray
    psi1: Optional[np.ndarray] = None
    psi2: Optional[np.ndarray] = None
    lam1: Optional[np.ndarray] = None
    lam2: Optional[np.ndarray] = None


@dataclass(frozen=True)
class ReducedModel:
    """Reduced, nonsingular model over the unconstrained state x^u (dimension n - ell)."""

    n: int
    ell: int
    r: int
    T: int
    steps: tuple

    @property
    def reduced_dim(self) -> int:
        return self.n - self.ell

    def __getitem__(self, t: int) -> ReducedStep:
        return self.steps[t]


def _check_diagonal(factor: np.ndarray, name: str, floor: float) -> None:
    diag = np.abs(np.diagonal(factor))
    bad = np.flatnonzero(~(diag > floor))
    if bad.size:
        i = int(bad[0])
        raise RankDeficient(f"{name} has diagonal entry {i} of magnitude {diag[i]:.3e}", factor=name)


def _right_solve(T: np.ndarray, M: np.ndarray, floor: float) -> np.ndarray:
    """M T^{-1} for lower-triangular T, via T* X* = M*."""
    return solve_triangular(T, M.T, lower=True, trans=True, floor=floor).T


def reduce_one_step(
    Phi: np.ndarray,
    Qm: np.ndarray,
    Cm: np.ndarray,
    Fm: np.ndarray,
    dims: tuple[int, int, int],
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> OneStepReduction:
    """
    Reduce the one-step model x = Phi z + Q u, y = C x + F w.

    Args:
        Phi: n x n transition
        Qm: n x n process noise factor
        Cm: (ell + r) x n observation matrix
        Fm: (ell + r) x r observation noise factor
        dims: (n, ell, r)
        tolerances: rank_floor applies to Sc, Zc, Zu and Lu

    Returns:
        OneStepReduction

    Raises:
        RankDeficient: Sc, Zc, Zu or Lu has a diagonal entry at or below the floor
    """
    n, ell, r = dims
    m = ell + r
    for name, mat, shape in (("Phi", Phi, (n, n)), ("Q", Qm, (n, n)), ("C", Cm, (m, n)), ("F", Fm, (m, r))):
        if np.shape(mat) != shape:
            raise DimensionMismatch(f"{name} has shape {np.shape(mat)}, expected {shape}")

    # Noise-free directions of y: the columns of the QL factor that F does not reach
    Qf, Lf = ql_complete(Fm)
    Vc, Vu = Qf[:, :ell], Qf[:, ell:]
    Lu = Lf[ell:, :]

    Lc, Qc = lq_complete(Vc.T @ Cm)
    Sc = Lc[:, :ell]
    Wc, Wu = Qc[:ell].T, Qc[ell:].T

    W = np.concatenate([Wc, Wu], axis=1)
    Lz, Qz = lq_complete(W.T @ Qm)
    Zc, Zstar, Zu = Lz[:ell, :ell], Lz[ell:, :ell], Lz[ell:, ell:]
    Uc, Uu = Qz[:ell].T, Qz[ell:].T

    floor = tolerances.rank_floor
    _check_diagonal(Sc, "S_c", floor)
    _check_diagonal(Zc, "Z_c", floor)
    _check_diagonal(Zu, "Z_u", floor)
    _check_diagonal(Lu, "L_u", floor)

    G = _right_solve(Zc, Zstar, floor)
    return OneStepReduction(Vu=Vu, Vc=Vc, Lu=Lu, Wc=Wc, Wu=Wu, Sc=Sc, Zc=Zc, Zu=Zu,
                            Zstar=Zstar, G=G, Uc=Uc, Uu=Uu)


def reduce_model(model: StateSpaceModel, tolerances: Tolerances = DEFAULT_TOLERANCES) -> ReducedModel:
    """
    Reduce a time-varying model step by step.

    Args:
        model: State-space model satisfying the full-rank assumptions
        tolerances: rank_floor applies to every step's triangular factors

    Returns:
        ReducedModel with T + 1 steps

    Raises:
        RankDeficient: tagged with the offending time step
    """
    n, ell, r = model.n, model.ell, model.r
    floor = tolerances.rank_floor
    steps = []
    previous = None

    for t in range(model.T + 1):
        Phi, Cm = model.Phi[t], model.Cmat[t]
        try:
            one = reduce_one_step(Phi, model.Qmat[t], Cm, model.Fmat[t], (n, ell, r), tolerances)
            recon_offset_map = _right_solve(one.Sc, one.Wc, floor)
            gain = _right_solve(one.Sc, one.G, floor)
        except (RankDeficient, SingularTriangular) as e:
            logger.error(f"Reduction failed at step {t}: {e}")
            raise (e if isinstance(e, RankDeficient) else RankDeficient(str(e))).at_step(t) from e

        obs_c = one.Vu.T @ Cm
        step = dict(
            gain=gain,
            trans_noise=one.Zu,
            cons_noise=np.tril(one.Sc @ one.Zc),
            obs_lin=obs_c @ one.Wu,
            obs_offset_map=obs_c @ recon_offset_map,
            obs_noise=one.Lu,
            recon_w=one.Wu,
            recon_offset_map=recon_offset_map,
            Vu=one.Vu,
            Vc=one.Vc,
        )

        if previous is not None:
            projection = one.Wu.T - one.G @ one.Wc.T
            from_unconstrained = Phi @ previous.recon_w
            from_constrained = Phi @ previous.recon_offset_map
            step.update(
                psi1=projection @ from_unconstrained,
                psi2=projection @ from_constrained,
                lam1=one.Sc @ (one.Wc.T @ from_unconstrained),
                lam2=one.Sc @ (one.Wc.T @ from_constrained),
            )

        previous = ReducedStep(**{name: np.ascontiguousarray(mat) for name, mat in step.items()})
        steps.append(previous)
        logger.debug(f"Reduced step {t}: state {n} -> {n - ell}")

    return ReducedModel(n=n, ell=ell, r=r, T=model.T, steps=tuple(steps))


def transform_observation(red: ReducedModel, t: int, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Split a raw observation into constrained and unconstrained parts.

    Args:
        red: Reduced model
        t: Time index
        y: Observation of length ell + r

    Returns:
        (y_c, y_u) = (Vc* y, Vu* y)
    """
    y = np.asarray(y)
    if y.shape != (red.ell + red.r,):
        raise DimensionMismatch(f"observation {t} has shape {y.shape}, expected ({red.ell + red.r},)")
    step = red[t]
    return step.Vc.T @ y, step.Vu.T @ y


def transform_observations(red: ReducedModel, obs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Transform a (T+1) x (ell+r) observation array into (T+1) x ell and (T+1) x r arrays."""
    obs = np.asarray(obs)
    if obs.ndim != 2 or obs.shape[0] != red.T + 1:
        raise DimensionMismatch(f"expected {red.T + 1} observations, got array of shape {obs.shape}")
    dtype = red[0].Vc.dtype
    y_c = np.empty((red.T + 1, red.ell), dtype=dtype)
    y_u = np.empty((red.T + 1, red.r), dtype=dtype)
    for t in range(red.T + 1):
        y_c[t], y_u[t] = transform_observation(red, t, obs[t])
    return y_c, y_u


def reconstruct_state(red: ReducedModel, t: int, xu: CholGaussian, y_c: np.ndarray) -> CholGaussian:
    """
    Full-state Gaussian from the unconstrained state and the constrained observation.

    Args:
        red: Reduced model
        t: Time index
        xu: Gaussian over x^u_t
        y_c: Realized constrained observation at t

    Returns:
        Gaussian over x_t with an n x (n - ell) lower-trapezoidal factor
    """
    step = red[t]
    if xu.dim != red.reduced_dim:
        raise DimensionMismatch(f"x^u has dim {xu.dim}, expected {red.reduced_dim}")
    mean = step.recon_w @ xu.mean + step.recon_offset_map @ np.asarray(y_c)
    return CholGaussian(mean, lower_factor(step.recon_w @ xu.cov_factor))
