"""
Result tables of estimation runs.
"""

from typing import Optional

import numpy as np
import pandas as pd

from singular_ssm.gaussian import CholGaussian
from singular_ssm.utils.table import vector_columns

TOTAL_ROW = "total"


def factor_columns(k: int) -> list[str]:
    """Column names of the lower triangle of a k x k factor, row by row."""
    return [f"factor{i}_{j}" for i in range(k) for j in range(i + 1)]


def _lower_triangle(factor: np.ndarray) -> np.ndarray:
    k, q = factor.shape
    padded = np.zeros((k, k), dtype=factor.dtype)
    padded[:, :q] = factor
    return padded[np.tril_indices(k)]


def estimation_table(marginals: list[CholGaussian], increments: Optional[list] = None) -> pd.DataFrame:
    """
    One row per time step: t, mean components, lower triangle of the covariance factor.

    Rank-deficient factors (fewer columns than rows) are padded with zero columns.
    With increments, the columns loglik_c, loglik_u and the running loglik_total
    are added, followed by a trailer row whose t is "total".

    Args:
        marginals: Gaussians, one per time step
        increments: (constrained, unconstrained) log-likelihood increments per step

    Returns:
        DataFrame ready for utils.table.write_table
    """
    k = marginals[0].dim if marginals else 0
    means = np.array([g.mean for g in marginals], dtype=np.float64).reshape(len(marginals), k)
    factors = np.array([_lower_triangle(g.cov_factor) for g in marginals], dtype=np.float64)
    factors = factors.reshape(len(marginals), k * (k + 1) // 2)

    frame = pd.concat([
        pd.DataFrame({"t": np.arange(len(marginals))}),
        pd.DataFrame(means, columns=vector_columns("mean", k)),
        pd.DataFrame(factors, columns=factor_columns(k)),
    ], axis=1)

    if increments is None:
        return frame

    # Same accumulation order as EstimationOutput.loglik
    running, total = [], 0.0
    for inc_c, inc_u in increments:
        total += inc_c
        total += inc_u
        running.append(total)
    frame["loglik_c"] = [inc[0] for inc in increments]
    frame["loglik_u"] = [inc[1] for inc in increments]
    frame["loglik_total"] = running

    trailer = pd.DataFrame({"t": [TOTAL_ROW], "loglik_total": [total]})
    return pd.concat([frame.astype({"t": object}), trailer], ignore_index=True)


def samples_table(samples: np.ndarray) -> pd.DataFrame:
    """Long table of posterior trajectory draws: sample, t, state components."""
    num_samples, steps, k = samples.shape
    index = pd.DataFrame({
        "sample": np.repeat(np.arange(num_samples), steps),
        "t": np.tile(np.arange(steps), num_samples),
    })
    values = pd.DataFrame(samples.reshape(num_samples * steps, k).astype(np.float64), columns=vector_columns("x", k))
    return pd.concat([index, values], axis=1)
