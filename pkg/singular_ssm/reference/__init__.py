# Oracles and baselines
from singular_ssm.reference.batch import BatchPosterior, DenseJointLaw, batch_condition, build_joint
from singular_ssm.reference.conventional import DenseGaussian, conventional_reduced_smoother
from singular_ssm.reference.exact import exact_condition
from singular_ssm.reference.flops import FlopModel, flop_ratio
from singular_ssm.reference.unreduced import unreduced_robust_filter

__all__ = [
    "BatchPosterior",
    "DenseGaussian",
    "DenseJointLaw",
    "FlopModel",
    "batch_condition",
    "build_joint",
    "conventional_reduced_smoother",
    "exact_condition",
    "flop_ratio",
    "unreduced_robust_filter",
]
