import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from conftest import make_model
from singular_ssm.experiment import hilbert_matrix, hilbert_model, random_model, simulate
from singular_ssm.experiment.hilbert.main import METHODS, HilbertBenchmarkPipeline, log10_mae, worse
from singular_ssm.experiment.runtime.main import RuntimeBenchmarkPipeline, config_dims, predicted_ratio
from singular_ssm.utils.constants import HILBERT_DIMS
from singular_ssm.utils.database import ResultStore
from singular_ssm.utils.errors import DimensionMismatch


class TestSimulate:
    def test_deterministic(self):
        model = make_model(4, 1, 2, 5, seed=0)
        x1, y1 = simulate(model, seed=11)
        x2, y2 = simulate(model, seed=11)
        assert_array_equal(x1, x2)
        assert_array_equal(y1, y2)
        assert not np.array_equal(y1, simulate(model, seed=12)[1])

    def test_prefix_does_not_depend_on_horizon(self):
        model = make_model(3, 1, 1, 6, seed=1)
        x_long, y_long = simulate(model, seed=5)
        x_short, y_short = simulate(model.truncated(2), seed=5)
        assert_array_equal(x_long[:3], x_short)
        assert_array_equal(y_long[:3], y_short)

    def test_zero_noise(self):
        x, y = simulate(make_model(3, 1, 1, 4, seed=2), seed=0, zero_noise=True)
        assert not x.any()
        assert not y.any()

    def test_noise_free_observations(self):
        model = random_model(6, 2, 0, 3, seed=4)
        x, y = simulate(model, seed=4)
        for t in range(4):
            assert_array_equal(y[t], model.Cmat[t] @ x[t])

    def test_single_precision(self):
        model = random_model(5, 2, 1, 3, seed=0, dtype=np.float32)
        x, y = simulate(model, seed=0)
        assert x.dtype == np.float32 and y.dtype == np.float32


class TestModels:
    def test_random_model_dims(self):
        model = random_model(8, 2, 2, 4, seed=3)
        assert (model.n, model.m, model.T, model.seed) == (8, 4, 4, 3)
        assert model.Fmat[0].shape == (4, 2)

    def test_random_model_is_seeded(self):
        a, b = random_model(4, 1, 1, 2, seed=9), random_model(4, 1, 1, 2, seed=9)
        assert_array_equal(a.Qmat[2], b.Qmat[2])
        assert not np.array_equal(a.Qmat[1], a.Qmat[2])

    def test_random_model_invalid(self):
        with pytest.raises(DimensionMismatch):
            random_model(4, 3, 2, 1, seed=0)

    def test_hilbert_matrix(self):
        H = hilbert_matrix(3)
        assert_allclose(H, [[1, 1 / 2, 1 / 3], [1 / 2, 1 / 3, 1 / 4], [1 / 3, 1 / 4, 1 / 5]], rtol=1e-15)

    def test_hilbert_model(self):
        model = hilbert_model(5, 2, T=3)
        assert (model.n, model.ell, model.r) == (5, 2, 0)
        assert_array_equal(model.Cmat[3], np.eye(2, 5))
        assert_array_equal(model.Phi[0], np.eye(5))


class TestRuntimeBenchmark:
    def test_config_dims(self):
        assert config_dims(10, "l=n/4,r=n/4") == (2, 2)
        assert config_dims(100, "l=n/2,r=0") == (50, 0)

    def test_predicted_ratio(self):
        assert [round(predicted_ratio(c), 2) for c in ("l=n/2,r=0", "l=n/4,r=0", "l=n/4,r=n/4", "l=n/8,r=n/8")] \
            == [0.30, 0.63, 0.54, 0.89]

    def test_small_run(self):
        frame = RuntimeBenchmarkPipeline(sizes=[8], T=3, repeats=1, precision="double").run()
        assert len(frame) == 4
        assert (frame["reduced_seconds"] > 0).all()
        assert_allclose(frame["ratio"], frame["reduced_seconds"] / frame["unreduced_seconds"])
        assert set(frame["ell"]) == {4, 2, 1}

    @pytest.mark.slow
    def test_reduction_pays_off_at_scale(self):
        frame = RuntimeBenchmarkPipeline(sizes=[300], configs=["l=n/2,r=0"], T=5, repeats=2,
                                         precision="double").run()
        assert frame["ratio"].item() < 1.0

    def test_unknown_config(self):
        with pytest.raises(ValueError):
            RuntimeBenchmarkPipeline(configs=["l=n"])

    def test_unknown_precision(self):
        with pytest.raises(ValueError):
            RuntimeBenchmarkPipeline(precision="half")


class TestHilbertBenchmark:
    def test_log10_mae(self):
        assert log10_mae(np.array([1.0, 1.0]), np.array([0.9, 1.1])) == pytest.approx(-1.0)
        assert np.isnan(log10_mae(np.array([np.nan]), np.array([0.0])))
        assert log10_mae(np.zeros(2), np.zeros(2)) == -np.inf

    def test_worse(self):
        assert worse(-12.0, -9.0) == -9.0
        assert np.isnan(worse(np.nan, -3.0))

    def test_small_run(self):
        pipeline = HilbertBenchmarkPipeline(dims=[(5, 2)], T=20, seed=1)
        frame = pipeline.run()
        assert list(frame["method"]) == list(METHODS)
        ours = frame.loc[frame["method"] == "qr-reduced", "log10_mae"].item()
        assert ours <= -12

        wide = HilbertBenchmarkPipeline.wide(frame)
        assert list(wide.columns) == ["n", "ell", *METHODS]
        assert len(wide) == 1

    def test_reference_uses_first_step(self):
        model = hilbert_model(4, 2, T=5)
        _, y = simulate(model, seed=1)
        mean, cov = HilbertBenchmarkPipeline(T=5).reference(model, y)
        assert_allclose(mean[:2], y[0], atol=1e-15)
        assert_allclose(cov[:2, :2], 0.0, atol=1e-15)


@pytest.mark.slow
class TestHilbertRobustness:
    """Full benchmark at T=500 in double precision."""

    @pytest.fixture(scope="class")
    def errors(self):
        frame = HilbertBenchmarkPipeline(dims=HILBERT_DIMS).run()
        return HilbertBenchmarkPipeline.wide(frame).set_index("n")

    def test_square_root_smoother_stays_accurate(self, errors):
        assert (errors.loc[errors.index <= 9, "qr-reduced"] <= -12).all()
        assert errors.loc[11, "qr-reduced"] <= -4
        assert np.isfinite(errors["qr-reduced"]).all()

    @staticmethod
    def broke_down(values):
        return bool(((values >= 0) | np.isnan(values)).any())

    def test_cholesky_baseline_breaks_down(self, errors):
        assert self.broke_down(errors.loc[[7, 8, 9], "conventional-cholesky"])

    def test_lu_baseline_breaks_down(self, errors):
        assert self.broke_down(errors.loc[[7, 8, 9, 10], "conventional-lu"])


class TestResultStore:
    def test_insert_and_read_back(self, tmp_path):
        frame = pd.DataFrame({"n": [5, 6], "ell": [2, 3], "method": ["qr-reduced", "conventional-lu"],
                              "log10_mae_mean": [-16.0, np.nan], "log10_mae_cov": [-15.5, np.nan],
                              "log10_mae": [-15.5, np.nan]})
        with ResultStore(tmp_path / "results.db") as store:
            run_id = store.insert_frame("hilbert_benchmark", frame)
            assert store.get_table_count("hilbert_benchmark") == 2
            stored = store.get_run("hilbert_benchmark", run_id).sort_values("n")
        assert list(stored["method"]) == ["qr-reduced", "conventional-lu"]
        assert stored["log10_mae"].isna().tolist() == [False, True]

    def test_runs_accumulate(self, tmp_path):
        frame = RuntimeBenchmarkPipeline(sizes=[4], configs=["l=n/2,r=0"], T=1, repeats=1,
                                         precision="double").run()
        with ResultStore(tmp_path / "results.db") as store:
            first = store.insert_frame("runtime_benchmark", frame)
            second = store.insert_frame("runtime_benchmark", frame)
            assert first != second
            assert store.get_table_count("runtime_benchmark") == 2

    def test_unknown_table(self, tmp_path):
        with ResultStore(tmp_path / "results.db") as store:
            with pytest.raises(ValueError):
                store.insert_frame("matches", pd.DataFrame({"n": [1]}))
