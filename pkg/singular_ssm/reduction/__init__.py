# Offline model reduction
from singular_ssm.reduction.model import StateSpaceModel
from singular_ssm.reduction.main import (
    OneStepReduction,
    ReducedModel,
    ReducedStep,
    reconstruct_state,
    reduce_model,
    reduce_one_step,
    transform_observation,
    transform_observations,
)

__all__ = [
    "OneStepReduction",
    "ReducedModel",
    "ReducedStep",
    "StateSpaceModel",
    "reconstruct_state",
    "reduce_model",
    "reduce_one_step",
    "transform_observation",
    "transform_observations",
]
