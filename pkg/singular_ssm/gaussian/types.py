from dataclasses import dataclass

import numpy as np

from singular_ssm.utils.errors import DimensionMismatch


@dataclass(frozen=True)
class CholGaussian:
    """Gaussian N(mean, cov_factor cov_factor*) in square-root form.

    cov_factor is k x q with q <= k and lower-trapezoidal. q < k encodes a
    rank-deficient (partially deterministic) Gaussian.
    """

    mean: np.ndarray
    cov_factor: np.ndarray

    def __post_init__(self):
        mean = np.asarray(self.mean)
        factor = np.asarray(self.cov_factor)
        if mean.ndim != 1 or factor.ndim != 2 or factor.shape[0] != mean.shape[0]:
            raise DimensionMismatch(f"CholGaussian got mean {mean.shape} and factor {factor.shape}")
        if factor.shape[1] > factor.shape[0]:
            raise DimensionMismatch(f"CholGaussian factor must have q <= k, got {factor.shape}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov_factor", factor)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def rank(self) -> int:
        """Number of columns of the factor (an upper bound on the covariance rank)."""
        return self.cov_factor.shape[1]

    @property
    def is_square(self) -> bool:
        return self.cov_factor.shape[1] == self.cov_factor.shape[0]

    @property
    def cov(self) -> np.ndarray:
        """Dense covariance. For reporting and tests; never used by the conditioning code."""
        return self.cov_factor @ self.cov_factor.T

    @classmethod
    def standard(cls, k: int, dtype=np.float64) -> "CholGaussian":
        return cls(np.zeros(k, dtype=dtype), np.eye(k, dtype=dtype))


@dataclass(frozen=True)
class AffineGaussianMap:
    """Conditional Gaussian y | x ~ N(lin x + offset, noise_factor noise_factor*).

    lin is j x k, offset has length j and noise_factor is j x p. p may be 0,
    which makes the map deterministic.
    """

    lin: np.ndarray
    offset: np.ndarray
    noise_factor: np.ndarray

    def __post_init__(self):
        lin = np.asarray(self.lin)
        offset = np.asarray(self.offset)
        noise = np.asarray(self.noise_factor)
        if lin.ndim != 2 or offset.shape != (lin.shape[0],) or noise.ndim != 2 or noise.shape[0] != lin.shape[0]:
            raise DimensionMismatch(
                f"AffineGaussianMap got lin {lin.shape}, offset {offset.shape}, noise {noise.shape}"
            )
        object.__setattr__(self, "lin", lin)
        object.__setattr__(self, "offset", offset)
        object.__setattr__(self, "noise_factor", noise)

    @property
    def source_dim(self) -> int:
        return self.lin.shape[1]

    @property
    def target_dim(self) -> int:
        return self.lin.shape[0]

    def evaluate(self, x: np.ndarray) -> CholGaussian:
        """The Gaussian y | x at a realized x."""
        return CholGaussian(self.lin @ x + self.offset, self.noise_factor)


@dataclass(frozen=True)
class ConditioningResult:
    """Marginal p(y) and backward kernel p(x | y) of a Gaussian pair."""

    marginal: CholGaussian
    backward: AffineGaussianMap
