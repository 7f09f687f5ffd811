# Square-root Gaussians and robust conditioning
from singular_ssm.gaussian.types import AffineGaussianMap, CholGaussian, ConditioningResult
from singular_ssm.gaussian.condition import (
    bayes_update,
    gaussian_logpdf,
    marginalize,
    marginalize_and_condition,
)

__all__ = [
    "AffineGaussianMap",
    "CholGaussian",
    "ConditioningResult",
    "bayes_update",
    "gaussian_logpdf",
    "marginalize",
    "marginalize_and_condition",
]
