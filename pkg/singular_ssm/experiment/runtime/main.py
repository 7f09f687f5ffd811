"""
Runtime benchmark: reduced versus unreduced robust filter.

For every state dimension n and (ell, r) configuration, a random model and a
simulated observation sequence are generated, and the online stage of both
filters is timed (best of several repeats). The offline reduction is timed
separately and kept out of the ratio. The predicted ratio comes from the
operation-count model only.
"""

import time
from fractions import Fraction
from typing import Callable, Optional

import numpy as np
import pandas as pd

from singular_ssm.estimation import filter as reduced_filter
from singular_ssm.experiment.models import random_model
from singular_ssm.experiment.simulate import simulate
from singular_ssm.reduction import reduce_model
from singular_ssm.reference import flop_ratio, unreduced_robust_filter
from singular_ssm.utils.constants import (
    RUNTIME_CONFIGS,
    RUNTIME_HORIZON,
    RUNTIME_REPEATS,
    RUNTIME_SIZES,
    Precision,
)
from singular_ssm.utils.database import ResultStore
from singular_ssm.utils.logging import get_logger

logger = get_logger()

DTYPES = {Precision.SINGLE: np.float32, Precision.DOUBLE: np.float64}


def best_time(func: Callable[[], object], repeats: int) -> float:
    """Fastest wall-clock time of repeated calls, in seconds."""
    best = float("inf")
    for _ in range(max(repeats, 1)):
        start = time.perf_counter()
        func()
        best = min(best, time.perf_counter() - start)
    return best


def config_dims(n: int, config: str) -> tuple[int, int]:
    """(ell, r) of a named configuration, rounded down."""
    ell_frac, r_frac = RUNTIME_CONFIGS[config]
    return int(ell_frac * n), int(r_frac * n)


def predicted_ratio(config: str) -> float:
    """Operation-count ratio of a configuration in the large-n limit (exact rational arithmetic)."""
    ell_frac, r_frac = RUNTIME_CONFIGS[config]
    return float(flop_ratio(Fraction(1), ell_frac, r_frac))


class RuntimeBenchmarkPipeline:
    """Times the reduced and unreduced filters on random models."""

    def __init__(
        self,
        sizes: Optional[list[int]] = None,
        configs: Optional[list[str]] = None,
        T: int = RUNTIME_HORIZON,
        repeats: int = RUNTIME_REPEATS,
        precision: str = Precision.SINGLE,
        seed: int = 0,
        db_path: Optional[str] = None,
    ):
        """
        Initialize the pipeline.

        Args:
            sizes: State dimensions n
            configs: Names from RUNTIME_CONFIGS
            T: Last time index of every run
            repeats: Timing repeats; the fastest one is kept
            precision: single or double
            seed: Seed for model parameters and noise
            db_path: Optional DuckDB file receiving the results
        """
        self.sizes = sizes or list(RUNTIME_SIZES)
        self.configs = configs or list(RUNTIME_CONFIGS)
        unknown = [c for c in self.configs if c not in RUNTIME_CONFIGS]
        if unknown:
            raise ValueError(f"Unknown configurations {unknown}; choose from {list(RUNTIME_CONFIGS)}")
        if precision not in DTYPES:
            raise ValueError(f"precision must be one of {list(DTYPES)}, got '{precision}'")
        self.T = T
        self.repeats = repeats
        self.precision = precision
        self.seed = seed
        self.db_path = db_path

    def run_one(self, n: int, config: str) -> dict:
        """Benchmark one (n, configuration) pair and return its result row."""
        ell, r = config_dims(n, config)
        model = random_model(n, ell, r, self.T, seed=self.seed, dtype=DTYPES[self.precision])
        _, y = simulate(model, seed=self.seed)

        start = time.perf_counter()
        red = reduce_model(model)
        reduction_seconds = time.perf_counter() - start

        reduced_seconds = best_time(lambda: reduced_filter(red, y), self.repeats)
        unreduced_seconds = best_time(lambda: unreduced_robust_filter(model, y), self.repeats)

        row = {
            "config": config,
            "precision": self.precision,
            "n": n,
            "ell": ell,
            "r": r,
            "T": self.T,
            "reduced_seconds": reduced_seconds,
            "unreduced_seconds": unreduced_seconds,
            "ratio": reduced_seconds / unreduced_seconds,
            "predicted_ratio": predicted_ratio(config),
            "reduction_seconds": reduction_seconds,
        }
        logger.info(f"n={n} {config}: ratio {row['ratio']:.3f} (predicted {row['predicted_ratio']:.2f})")
        return row

    def run(self) -> pd.DataFrame:
        """Run every configuration and return the result table."""
        logger.info(f"Starting runtime benchmark: sizes={self.sizes}, T={self.T}, {self.precision} precision")
        rows = [self.run_one(n, config) for config in self.configs for n in self.sizes]
        frame = pd.DataFrame(rows)
        logger.info(f"✅ Runtime benchmark completed: {len(frame)} rows")

        if self.db_path:
            with ResultStore(self.db_path) as store:
                store.insert_frame("runtime_benchmark", frame)
        return frame
