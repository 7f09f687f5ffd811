"""

Setup:

1. Activate virtual environment
    source venv/bin/activate

2. Install requirements
    uv pip install -r requirements.txt


Commands:

    # Offline reduction of a model file
    uv run -m singular_ssm.cli reduce model.json --out reduced.json

    # Simulate states and observations
    uv run -m singular_ssm.cli simulate model.json --seed 7 --out traj.csv

    # Filter or smooth (model or reduced-model file), with log-likelihood
    uv run -m singular_ssm.cli estimate model.json traj.csv --mode smooth --loglik --reconstruct --out est.csv

    # Runtime benchmark (single precision, best of three)
    uv run -m singular_ssm.cli bench-runtime --n 10 --n 100 --n 1000 --out runtime.csv

    # Hilbert-matrix robustness benchmark
    uv run -m singular_ssm.cli bench-hilbert --out hilbert.csv --db database/benchmarks.db


"""

import sys
from pathlib import Path
from typing import List, Optional

import typer

# Add the project root to the Python path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from singular_ssm.estimation import (
    estimation_table,
    filter,
    reconstruct_all,
    sample_posterior,
    samples_table,
    smooth,
)
from singular_ssm.experiment.hilbert.main import HilbertBenchmarkPipeline
from singular_ssm.experiment.runtime.main import DTYPES, RuntimeBenchmarkPipeline
from singular_ssm.experiment.simulate import simulate as simulate_trajectory
from singular_ssm.reduction import ReducedModel, StateSpaceModel, reduce_model
from singular_ssm.reduction.parse import ModelParser, read_observations, write_reduced, write_trajectory
from singular_ssm.reference import unreduced_robust_filter
from singular_ssm.utils.config import DEFAULT_TOLERANCES
from singular_ssm.utils.constants import (
    HILBERT_DIMS,
    HILBERT_HORIZON,
    HILBERT_SEED,
    RUNTIME_HORIZON,
    RUNTIME_REPEATS,
    RUNTIME_SIZES,
    STREAM_POSTERIOR_SAMPLES,
    ExitCode,
    Precision,
)
from singular_ssm.utils.errors import (
    DimensionMismatch,
    ModelParseError,
    NumericalFailure,
    RankDeficient,
    SingularTriangular,
)
from singular_ssm.utils.logging import enable_file_logging, get_logger, set_verbosity
from singular_ssm.utils.rng import keyed_generator
from singular_ssm.utils.table import write_table

logger = get_logger()

app = typer.Typer(pretty_exceptions_show_locals=False)


def _fail(code: int, message: str) -> typer.Exit:
    logger.error(message)
    typer.echo(f"error: {message}", err=True)
    return typer.Exit(code=code)


def _load(path: Path, precision: str) -> StateSpaceModel | ReducedModel:
    try:
        model = ModelParser(dtype=DTYPES[precision]).parse_file(path)
        if isinstance(model, StateSpaceModel):
            model.check_ranks(DEFAULT_TOLERANCES.rank_floor)
    except ModelParseError as e:
        raise _fail(ExitCode.PARSE, f"{path}: {e}")
    except RankDeficient as e:
        raise _fail(ExitCode.RANK_DEFICIENT, f"rank deficiency at t={e.step}: {e}")
    return model


def _emit(frame, out: Optional[Path]) -> None:
    if out is None:
        typer.echo(frame.to_csv(index=False, float_format="%.17g"), nl=False)
    else:
        write_table(frame, out)
        logger.info(f"✅ Wrote {len(frame)} rows to {out}")


@app.callback()
def main(
    log_dir: Path = typer.Option(Path("log"), help="Directory for the run log"),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log per-step detail"),
):
    """Robust filtering and smoothing for state-space models with noise-free observations."""
    set_verbosity(verbose)
    enable_file_logging(str(log_dir))


@app.command()
def reduce(
    model_path: Path,
    out: Path = typer.Option(..., "--out", help="Reduced-model file to write"),
):
    """Reduce a model before seeing any observations"""
    model = _load(model_path, Precision.DOUBLE)
    if isinstance(model, ReducedModel):
        raise _fail(ExitCode.PARSE, f"{model_path} already holds a reduced model")
    try:
        red = reduce_model(model)
    except RankDeficient as e:
        raise _fail(ExitCode.RANK_DEFICIENT, f"rank deficiency at t={e.step}: {e}")
    write_reduced(red, out)
    logger.info(f"✅ Reduced model (n={red.n}, ell={red.ell}) written to {out}")


@app.command()
def estimate(
    model_path: Path,
    obs_path: Path,
    mode: str = typer.Option("filter", help="filter or smooth"),
    loglik: bool = typer.Option(False, "--loglik", help="Add log-likelihood increments and a total row"),
    reconstruct: bool = typer.Option(False, "--reconstruct", help="Report full-state moments"),
    unreduced: bool = typer.Option(False, "--unreduced", help="Run the robust filter on the unreduced model"),
    samples: int = typer.Option(0, help="Posterior trajectory draws (smooth mode), written next to --out"),
    seed: int = typer.Option(0, help="Seed for posterior draws"),
    precision: str = typer.Option(Precision.DOUBLE, help="single or double"),
    out: Optional[Path] = typer.Option(None, "--out", help="Result CSV (stdout when omitted)"),
):
    """Filter or smooth an observation sequence"""
    if mode not in ("filter", "smooth"):
        raise _fail(ExitCode.PARSE, f"mode must be 'filter' or 'smooth', got '{mode}'")
    if precision not in DTYPES:
        raise _fail(ExitCode.PARSE, f"precision must be one of {list(DTYPES)}, got '{precision}'")
    if samples and (mode != "smooth" or out is None):
        raise _fail(ExitCode.PARSE, "--samples needs --mode smooth and --out")
    if reconstruct and unreduced:
        raise _fail(ExitCode.PARSE, "--reconstruct applies to reduced estimates, drop it with --unreduced")

    model = _load(model_path, precision)
    if unreduced and isinstance(model, ReducedModel):
        raise _fail(ExitCode.PARSE, "--unreduced needs an original model file, not a reduced one")
    try:
        obs = read_observations(obs_path, model.ell + model.r, model.T + 1, dtype=DTYPES[precision])
    except ModelParseError as e:
        raise _fail(ExitCode.PARSE, f"{obs_path}: {e}")

    store_backward = mode == "smooth"
    try:
        if unreduced:
            out_est = unreduced_robust_filter(model, obs, store_backward=store_backward)
            red = None
        else:
            red = model if isinstance(model, ReducedModel) else reduce_model(model)
            out_est = filter(red, obs, store_backward=store_backward)
        if store_backward:
            out_est = smooth(model if unreduced else red, out_est)
        if reconstruct:
            out_est = reconstruct_all(red, out_est, obs)
    except RankDeficient as e:
        raise _fail(ExitCode.RANK_DEFICIENT, f"rank deficiency at t={e.step}: {e}")
    except (SingularTriangular, NumericalFailure) as e:
        raise _fail(ExitCode.NUMERICAL, f"numerical failure at t={e.step}: {e}")
    except DimensionMismatch as e:
        raise _fail(ExitCode.PARSE, str(e))

    if out_est.reconstructed is not None:
        marginals = out_est.reconstructed
    elif out_est.smooth_marginals is not None:
        marginals = out_est.smooth_marginals
    else:
        marginals = out_est.filter_marginals

    frame = estimation_table(marginals, out_est.loglik_increments if loglik else None)
    _emit(frame, out)
    if loglik:
        logger.info(f"Log marginal likelihood: {out_est.loglik:.17g}")

    if samples:
        draws = sample_posterior(out_est, keyed_generator(seed, 0, STREAM_POSTERIOR_SAMPLES), samples)
        samples_path = out.with_name(f"{out.stem}_samples.csv")
        write_table(samples_table(draws), samples_path)
        logger.info(f"✅ Wrote {samples} posterior draws to {samples_path}")


@app.command()
def simulate(
    model_path: Path,
    seed: int = typer.Option(0, help="Noise seed"),
    zero_noise: bool = typer.Option(False, "--zero-noise", help="Disable process and observation noise"),
    out: Path = typer.Option(..., "--out", help="Trajectory CSV to write"),
):
    """Simulate states and observations from a model"""
    model = _load(model_path, Precision.DOUBLE)
    if isinstance(model, ReducedModel):
        raise _fail(ExitCode.PARSE, f"{model_path} holds a reduced model; simulation needs the original")
    x, y = simulate_trajectory(model, seed=seed, zero_noise=zero_noise)
    write_trajectory(x, y, out)
    logger.info(f"✅ Simulated T={model.T} steps to {out}")


@app.command()
def bench_runtime(
    n: Optional[List[int]] = typer.Option(None, "--n", help="State dimensions (repeatable)"),
    config: Optional[List[str]] = typer.Option(None, "--config", help="(ell, r) configuration names (repeatable)"),
    T: int = typer.Option(RUNTIME_HORIZON, "--T", help="Last time index"),
    repeats: int = typer.Option(RUNTIME_REPEATS, help="Timing repeats; the fastest is kept"),
    precision: str = typer.Option(Precision.SINGLE, help="single or double"),
    seed: int = typer.Option(0, help="Seed for model parameters and noise"),
    out: Optional[Path] = typer.Option(None, "--out", help="Result CSV (stdout when omitted)"),
    db: Optional[Path] = typer.Option(None, "--db", help="DuckDB file to append results to"),
):
    """Time reduced against unreduced filtering on random models"""
    try:
        pipeline = RuntimeBenchmarkPipeline(
            sizes=n or list(RUNTIME_SIZES),
            configs=config or None,
            T=T,
            repeats=repeats,
            precision=precision,
            seed=seed,
            db_path=str(db) if db else None,
        )
    except ValueError as e:
        raise _fail(ExitCode.PARSE, str(e))
    _emit(pipeline.run(), out)


@app.command()
def bench_hilbert(
    n: Optional[List[int]] = typer.Option(None, "--n", help="State dimensions (repeatable); ell = floor(n/2)"),
    T: int = typer.Option(HILBERT_HORIZON, "--T", help="Last time index"),
    seed: int = typer.Option(HILBERT_SEED, help="Noise seed"),
    reference_horizon: int = typer.Option(0, help="Observations used by the exact reference (beyond y_0)"),
    out: Optional[Path] = typer.Option(None, "--out", help="Result CSV (stdout when omitted)"),
    db: Optional[Path] = typer.Option(None, "--db", help="DuckDB file to append results to"),
):
    """Accuracy of smoothing under Hilbert-matrix process noise"""
    dims = [(k, k // 2) for k in n] if n else list(HILBERT_DIMS)
    pipeline = HilbertBenchmarkPipeline(
        dims=dims, T=T, seed=seed, reference_horizon=reference_horizon, db_path=str(db) if db else None
    )
    frame = pipeline.run()
    _emit(frame, out)
    typer.echo(HilbertBenchmarkPipeline.wide(frame).to_string(index=False), err=True)


if __name__ == "__main__":
    app()
