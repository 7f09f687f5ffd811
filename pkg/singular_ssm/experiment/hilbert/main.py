"""
Robustness benchmark on the Hilbert-matrix model.

For each (n, ell) the posterior moments of x_0 given all observations are
computed three ways on the same simulated data (our QR-based smoother and the
covariance-form smoother with LU or Cholesky solves) and compared with an exact
rational reference. Failures of the baselines show up as NaN.
"""

from typing import Optional

import numpy as np
import pandas as pd

from singular_ssm.estimation import filter, reconstruct_all, smooth
from singular_ssm.experiment.models import hilbert_model
from singular_ssm.experiment.simulate import simulate
from singular_ssm.reduction import StateSpaceModel, reduce_model
from singular_ssm.reference import conventional_reduced_smoother, exact_condition
from singular_ssm.reference.conventional import reconstruct_dense
from singular_ssm.utils.constants import HILBERT_DIMS, HILBERT_HORIZON, HILBERT_SEED
from singular_ssm.utils.database import ResultStore
from singular_ssm.utils.errors import SingularSSMError
from singular_ssm.utils.logging import get_logger

logger = get_logger()

METHODS = ("qr-reduced", "conventional-lu", "conventional-cholesky")


def log10_mae(estimate: np.ndarray, reference: np.ndarray) -> float:
    """log10 of the mean absolute error; NaN when the estimate is not finite."""
    if not np.all(np.isfinite(estimate)):
        return float("nan")
    with np.errstate(divide="ignore"):
        return float(np.log10(np.mean(np.abs(estimate - reference))))


def worse(a: float, b: float) -> float:
    if np.isnan(a) or np.isnan(b):
        return float("nan")
    return max(a, b)


class HilbertBenchmarkPipeline:
    """Accuracy of p(x_0 | y_{0:T}) under an ill-conditioned process noise."""

    def __init__(
        self,
        dims: Optional[list[tuple[int, int]]] = None,
        T: int = HILBERT_HORIZON,
        seed: int = HILBERT_SEED,
        reference_horizon: int = 0,
        db_path: Optional[str] = None,
    ):
        """
        Initialize the pipeline.

        Args:
            dims: (n, ell) pairs
            T: Last time index
            seed: Noise seed
            reference_horizon: Observations y_0..y_h used by the exact reference.
                Later observations carry no information on x_0 in this model, so 0 is exact.
            db_path: Optional DuckDB file receiving the results
        """
        self.dims = dims or list(HILBERT_DIMS)
        self.T = T
        self.seed = seed
        self.reference_horizon = min(reference_horizon, T)
        self.db_path = db_path

    def reference(self, model: StateSpaceModel, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Exact posterior mean and covariance of x_0."""
        h = self.reference_horizon
        mean, cov = exact_condition(model.truncated(h), y[:h + 1])
        n = model.n
        return mean[:n], cov[:n, :n]

    def estimates(self, model: StateSpaceModel, y: np.ndarray) -> dict[str, tuple[np.ndarray, np.ndarray]]:
        """Posterior moments of x_0 from every method; failed methods give NaN."""
        red = reduce_model(model)
        nan = (np.full(model.n, np.nan), np.full((model.n, model.n), np.nan))
        results = {}

        try:
            out = reconstruct_all(red, smooth(red, filter(red, y, store_backward=True)), y)
            first = out.reconstructed[0]
            results["qr-reduced"] = (first.mean, first.cov)
        except SingularSSMError as e:
            logger.warning(f"QR smoother failed for n={model.n}: {e}")
            results["qr-reduced"] = nan

        for solver in ("lu", "cholesky"):
            out = conventional_reduced_smoother(red, y, solver=solver)
            first = reconstruct_dense(red, out.smooth_marginals[:1], y)[0]
            results[f"conventional-{solver}"] = (first.mean, first.cov)
        return results

    def run_one(self, n: int, ell: int) -> list[dict]:
        """Benchmark one (n, ell) pair; one row per method."""
        model = hilbert_model(n, ell, self.T)
        _, y = simulate(model, seed=self.seed)
        ref_mean, ref_cov = self.reference(model, y)

        rows = []
        for method, (mean, cov) in self.estimates(model, y).items():
            mae_mean = log10_mae(mean, ref_mean)
            mae_cov = log10_mae(cov, ref_cov)
            rows.append({
                "n": n,
                "ell": ell,
                "method": method,
                "log10_mae_mean": mae_mean,
                "log10_mae_cov": mae_cov,
                "log10_mae": worse(mae_mean, mae_cov),
            })
        summary = ", ".join(f"{row['method']} {row['log10_mae']:.1f}" for row in rows)
        logger.info(f"n={n}, ell={ell}: {summary}")
        return rows

    def run(self) -> pd.DataFrame:
        """Run every (n, ell) pair and return the result table (long format)."""
        logger.info(f"Starting Hilbert benchmark: dims={self.dims}, T={self.T}, seed={self.seed}")
        rows = [row for n, ell in self.dims for row in self.run_one(n, ell)]
        frame = pd.DataFrame(rows)
        logger.info(f"✅ Hilbert benchmark completed: {len(frame)} rows")

        if self.db_path:
            with ResultStore(self.db_path) as store:
                store.insert_frame("hilbert_benchmark", frame)
        return frame

    @staticmethod
    def wide(frame: pd.DataFrame) -> pd.DataFrame:
        """One row per (n, ell), one column per method (worse of mean and covariance error)."""
        table = frame.pivot(index=["n", "ell"], columns="method", values="log10_mae").reset_index()
        table.columns.name = None
        return table[["n", "ell", *[m for m in METHODS if m in table.columns]]]
