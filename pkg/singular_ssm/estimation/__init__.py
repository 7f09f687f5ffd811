# Online filtering, smoothing and marginal likelihood
from singular_ssm.estimation.main import (
    EstimationOutput,
    FilterState,
    filter,
    reconstruct_all,
    sample_posterior,
    smooth,
)
from singular_ssm.estimation.report import estimation_table, samples_table

__all__ = [
    "EstimationOutput",
    "FilterState",
    "estimation_table",
    "filter",
    "reconstruct_all",
    "sample_posterior",
    "samples_table",
    "smooth",
]
