import sys
from pathlib import Path

import numpy as np
import pytest

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from singular_ssm.experiment import simulate
from singular_ssm.reduction import ReducedModel, ReducedStep, StateSpaceModel


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running property grids and benchmarks")


def make_model(n: int, ell: int, r: int, T: int, seed: int) -> StateSpaceModel:
    """Well-conditioned time-varying model: Q_t close to the identity, contracting Phi_t."""
    rng = np.random.default_rng(seed)
    m = ell + r
    mats = {"Phi": [], "Qmat": [], "Cmat": [], "Fmat": []}
    for _ in range(T + 1):
        mats["Phi"].append(0.9 * rng.standard_normal((n, n)) / np.sqrt(n))
        mats["Qmat"].append(np.eye(n) + 0.3 * rng.standard_normal((n, n)) / np.sqrt(n))
        mats["Cmat"].append(rng.standard_normal((m, n)))
        mats["Fmat"].append(rng.standard_normal((m, r)))
    return StateSpaceModel(n=n, ell=ell, r=r, T=T, **{k: tuple(v) for k, v in mats.items()})


def make_instance(n: int, ell: int, r: int, T: int, seed: int):
    """Model plus simulated observations."""
    model = make_model(n, ell, r, T, seed)
    _, y = simulate(model, seed=seed + 1000)
    return model, y


def axis_aligned_model(T: int = 3) -> StateSpaceModel:
    """n=2 random walk whose first coordinate is observed without noise."""
    return StateSpaceModel.time_invariant(
        Phi=np.eye(2), Qmat=np.eye(2), Cmat=[[1.0, 0.0]], Fmat=np.zeros((1, 0)), T=T, ell=1
    )


@pytest.fixture
def axis_model():
    return axis_aligned_model()


@pytest.fixture
def instance():
    return make_instance(5, 2, 1, 6, seed=3)


# (n, ell, r) patterns covering r = 0 and ell = 0
DIMENSIONS = [(3, 1, 1), (4, 2, 1), (5, 2, 1), (4, 0, 2), (4, 2, 0), (5, 1, 3), (3, 0, 3), (6, 3, 0)]


def constant_chain(T: int, obs_noise: float = 1.0) -> ReducedModel:
    """Hand-built reduced model of a constant scalar with N(0, 1) prior, observed with noise obs_noise."""
    empty = np.zeros((1, 0))
    steps = []
    for t in range(T + 1):
        steps.append(ReducedStep(
            gain=empty, trans_noise=np.eye(1) if t == 0 else np.zeros((1, 1)),
            cons_noise=np.zeros((0, 0)), obs_lin=np.eye(1), obs_offset_map=empty,
            obs_noise=obs_noise * np.eye(1),
            recon_w=np.eye(1), recon_offset_map=empty, Vu=np.eye(1), Vc=empty,
            psi1=None if t == 0 else np.eye(1), psi2=None if t == 0 else empty,
            lam1=None if t == 0 else np.zeros((0, 1)), lam2=None if t == 0 else np.zeros((0, 0)),
        ))
    return ReducedModel(n=1, ell=0, r=1, T=T, steps=tuple(steps))
