# Experiment package
from singular_ssm.experiment.models import hilbert_matrix, hilbert_model, random_model
from singular_ssm.experiment.simulate import simulate

__all__ = ["hilbert_matrix", "hilbert_model", "random_model", "simulate"]
