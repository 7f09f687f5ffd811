from dataclasses import dataclass
from typing import Optional

import numpy as np

from singular_ssm.linalg import lower_factor
from singular_ssm.utils.errors import DimensionMismatch, RankDeficient


@dataclass(frozen=True)
class StateSpaceModel:
    """Time-varying linear Gaussian model with partially noise-free observations.

        x_t = Phi_t x_{t-1} + Q_t u_t,   x_{-1} = 0
        y_t = C_t x_t + F_t w_t,         t = 0, ..., T

    u_t and w_t are standard Gaussian. y_t has ell + r entries of which ell
    are noise free.
    """

    n: int
    ell: int
    r: int
    T: int
    Phi: tuple
    Qmat: tuple
    Cmat: tuple
    Fmat: tuple
    seed: Optional[int] = None

    def __post_init__(self):
        for name in ("Phi", "Qmat", "Cmat", "Fmat"):
            object.__setattr__(self, name, tuple(np.asarray(a) for a in getattr(self, name)))
        self.validate()

    @property
    def m(self) -> int:
        """Observation dimension ell + r."""
        return self.ell + self.r

    @property
    def dtype(self) -> np.dtype:
        return self.Phi[0].dtype

    def validate(self) -> None:
        """
        Check dimension invariants.

        Raises:
            DimensionMismatch: naming the offending field and time index
        """
        n, ell, r, T = self.n, self.ell, self.r, self.T
        if min(n, ell, r, T) < 0:
            raise DimensionMismatch(f"dimensions must be nonnegative, got n={n}, ell={ell}, r={r}, T={T}")
        if ell + r > n:
            raise DimensionMismatch(f"need ell + r <= n, got ell={ell}, r={r}, n={n}")

        expected = {
            "Phi": (n, n),
            "Qmat": (n, n),
            "Cmat": (ell + r, n),
            "Fmat": (ell + r, r),
        }
        for name, shape in expected.items():
            mats = getattr(self, name)
            if len(mats) != T + 1:
                raise DimensionMismatch(f"{name} has {len(mats)} entries, expected T+1={T + 1}")
            for t, mat in enumerate(mats):
                if mat.shape != shape:
                    raise DimensionMismatch(f"{name}[{t}] has shape {mat.shape}, expected {shape}")

    def check_ranks(self, floor: float = 0.0) -> None:
        """
        Check that every Q_t is nonsingular, C_t has full row rank and F_t full column rank.

        Ranks are read off the diagonals of triangular factors. A diagonal
        magnitude at or below floor counts as a lost rank.

        Raises:
            RankDeficient: naming the factor, tagged with the first offending step
        """
        for t in range(self.T + 1):
            for factor, mat in (("Q", self.Qmat[t]), ("C", self.Cmat[t]), ("F", self.Fmat[t].T)):
                diag = np.abs(np.diagonal(lower_factor(mat)))
                if (diag <= floor).any():
                    raise RankDeficient(f"{factor}_t is rank deficient", factor=factor).at_step(t)

    def truncated(self, t: int) -> "StateSpaceModel":
        """The model restricted to steps 0..t."""
        if not 0 <= t <= self.T:
            raise DimensionMismatch(f"cannot truncate a T={self.T} model at t={t}")
        return StateSpaceModel(
            n=self.n, ell=self.ell, r=self.r, T=t,
            Phi=self.Phi[:t + 1], Qmat=self.Qmat[:t + 1],
            Cmat=self.Cmat[:t + 1], Fmat=self.Fmat[:t + 1],
            seed=self.seed,
        )

    def astype(self, dtype) -> "StateSpaceModel":
        """Copy with all parameter matrices cast to dtype."""
        cast = lambda mats: tuple(a.astype(dtype) for a in mats)
        return StateSpaceModel(
            n=self.n, ell=self.ell, r=self.r, T=self.T,
            Phi=cast(self.Phi), Qmat=cast(self.Qmat),
            Cmat=cast(self.Cmat), Fmat=cast(self.Fmat),
            seed=self.seed,
        )

    @classmethod
    def time_invariant(cls, Phi, Qmat, Cmat, Fmat, T: int, ell: int, seed: Optional[int] = None) -> "StateSpaceModel":
        """Build a model whose parameters repeat at every step."""
        Phi, Qmat, Cmat, Fmat = (np.asarray(a, dtype=float) for a in (Phi, Qmat, Cmat, Fmat))
        n = Phi.shape[0]
        r = Fmat.shape[1] if Fmat.ndim == 2 else 0
        if Fmat.size == 0:
            Fmat = np.zeros((Cmat.shape[0], r))
        return cls(
            n=n, ell=ell, r=r, T=T,
            Phi=(Phi,) * (T + 1), Qmat=(Qmat,) * (T + 1),
            Cmat=(Cmat,) * (T + 1), Fmat=(Fmat,) * (T + 1),
            seed=seed,
        )
