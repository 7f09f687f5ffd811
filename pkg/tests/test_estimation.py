import dataclasses
import math

import numpy as np
import pytest
import scipy.stats
from numpy.testing import assert_allclose, assert_array_equal

from conftest import DIMENSIONS, axis_aligned_model, constant_chain, make_instance, make_model
from singular_ssm.estimation import (
    EstimationOutput,
    estimation_table,
    filter,
    reconstruct_all,
    sample_posterior,
    smooth,
)
from singular_ssm.experiment import simulate
from singular_ssm.experiment.runtime.main import best_time
from singular_ssm.reduction import reconstruct_state, reduce_model, transform_observations
from singular_ssm.reference import batch_condition, build_joint
from singular_ssm.utils.errors import DimensionMismatch


def oracle(model, y, t):
    """Dense posterior of x_{0:t} given y_{0:t}."""
    sub = model.truncated(t)
    return batch_condition(build_joint(sub), y[:t + 1])


def close(actual, expected, tol=1e-8):
    assert_allclose(actual, expected, rtol=0, atol=tol * max(1.0, float(np.abs(expected).max(initial=0.0))))


class TestFilter:
    def test_axis_aligned(self):
        model = axis_aligned_model(T=3)
        red = reduce_model(model)
        y = np.array([[0.5], [1.0], [-0.2], [0.3]])
        out = filter(red, y)

        for t, marginal in enumerate(out.filter_marginals):
            assert_allclose(marginal.mean, [0.0], atol=1e-14)
            assert_allclose(marginal.cov, [[t + 1.0]], rtol=1e-13)
        assert all(inc_u == 0.0 for _, inc_u in out.loglik_increments)

        diffs = np.diff(y[:, 0], prepend=0.0)
        expected = scipy.stats.norm.logpdf(diffs).sum()
        assert out.loglik == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("n, ell, r", DIMENSIONS)
    def test_matches_dense_oracle(self, n, ell, r):
        model, y = make_instance(n, ell, r, 4, seed=n * 31 + ell * 7 + r)
        red = reduce_model(model)
        out = filter(red, y)
        y_c, _ = transform_observations(red, y)

        for t in range(model.T + 1):
            ref = oracle(model, y, t)
            mean, cov = ref.state(t)
            full = reconstruct_state(red, t, out.filter_marginals[t], y_c[t])
            close(full.mean, mean)
            close(full.cov, cov)

            Wu = red[t].recon_w
            close(out.filter_marginals[t].mean, Wu.T @ mean)
            close(out.filter_marginals[t].cov, Wu.T @ cov @ Wu)

            partial = EstimationOutput(out.filter_marginals[:t + 1], out.loglik_increments[:t + 1])
            assert partial.loglik == pytest.approx(ref.logdensity, abs=1e-8)

    @pytest.mark.slow
    def test_cost_grows_linearly_with_horizon(self):
        model, y = make_instance(6, 2, 1, 400, seed=5)
        horizons = [100, 200, 400]
        seconds = []
        for T in horizons:
            red, y_T = reduce_model(model.truncated(T)), y[:T + 1]
            seconds.append(best_time(lambda: smooth(red, filter(red, y_T, store_backward=True)), repeats=5))
        slope = np.polyfit(np.log(horizons), np.log(seconds), 1)[0]
        assert 0.7 <= slope <= 1.3

    def test_marginals_are_square_lower(self, instance):
        model, y = instance
        out = filter(reduce_model(model), y)
        for marginal in out.filter_marginals:
            assert marginal.is_square
            assert_array_equal(marginal.cov_factor, np.tril(marginal.cov_factor))

    def test_loglik_bookkeeping(self, instance):
        model, y = instance
        out = filter(reduce_model(model), y)
        total = 0.0
        for inc_c, inc_u in out.loglik_increments:
            total += inc_c
            total += inc_u
        assert out.loglik == total
        assert out.final_state.loglik == total
        assert out.final_state.t == model.T

    def test_deterministic(self, instance):
        model, y = instance
        red = reduce_model(model)
        first, second = filter(red, y), filter(red, y)
        assert first.loglik_increments == second.loglik_increments
        for a, b in zip(first.filter_marginals, second.filter_marginals):
            assert_array_equal(a.mean, b.mean)
            assert_array_equal(a.cov_factor, b.cov_factor)

    def test_backward_kernels_stored_on_request(self, instance):
        model, y = instance
        red = reduce_model(model)
        assert filter(red, y).backward_kernels is None
        assert len(filter(red, y, store_backward=True).backward_kernels) == model.T

    def test_wrong_observation_shape(self, instance):
        model, y = instance
        with pytest.raises(DimensionMismatch):
            filter(reduce_model(model), y[:-1])

    def test_single_precision(self, instance):
        model, y = instance
        out32 = filter(reduce_model(model.astype(np.float32)), y.astype(np.float32))
        out64 = filter(reduce_model(model), y)
        assert out32.filter_marginals[-1].mean.dtype == np.float32
        assert_allclose(out32.filter_marginals[-1].mean, out64.filter_marginals[-1].mean, atol=1e-3)


class TestSmooth:
    @pytest.mark.parametrize("n, ell, r", DIMENSIONS)
    def test_matches_dense_oracle(self, n, ell, r):
        model, y = make_instance(n, ell, r, 4, seed=n * 13 + ell * 5 + r + 1)
        red = reduce_model(model)
        out = reconstruct_all(red, smooth(red, filter(red, y, store_backward=True)), y)
        ref = oracle(model, y, model.T)

        for t in range(model.T + 1):
            mean, cov = ref.state(t)
            close(out.reconstructed[t].mean, mean)
            close(out.reconstructed[t].cov, cov)
        assert out.loglik == pytest.approx(ref.logdensity, abs=1e-8)

    def test_last_marginal_is_filter_marginal(self, instance):
        model, y = instance
        red = reduce_model(model)
        out = smooth(red, filter(red, y, store_backward=True))
        assert out.smooth_marginals[-1] is out.filter_marginals[-1]

    def test_single_step(self):
        model, y = make_instance(4, 1, 1, 0, seed=9)
        red = reduce_model(model)
        out = smooth(red, filter(red, y, store_backward=True))
        assert len(out.smooth_marginals) == 1
        assert out.smooth_marginals[0] is out.filter_marginals[0]

    def test_deterministic_chain(self):
        T = 4
        red = constant_chain(T)
        y = np.array([[0.3], [1.2], [-0.4], [0.8], [0.1]])
        out = smooth(red, filter(red, y, store_backward=True))
        for t in range(T):
            assert_allclose(out.smooth_marginals[t].mean, out.smooth_marginals[t + 1].mean, atol=1e-14)
            assert_allclose(out.smooth_marginals[t].cov, out.smooth_marginals[t + 1].cov, atol=1e-14)
        assert_allclose(out.smooth_marginals[0].mean, [y.sum() / (T + 2)], atol=1e-14)
        assert_allclose(out.smooth_marginals[0].cov, [[1.0 / (T + 2)]], atol=1e-14)

    def test_axis_aligned_prior_variance(self):
        red = reduce_model(axis_aligned_model(T=3))
        out = smooth(red, filter(red, np.zeros((4, 1)), store_backward=True))
        for t, marginal in enumerate(out.smooth_marginals):
            assert_allclose(marginal.cov, [[t + 1.0]], rtol=1e-13)

    def test_needs_backward_kernels(self, instance):
        model, y = instance
        red = reduce_model(model)
        with pytest.raises(DimensionMismatch):
            smooth(red, filter(red, y))


GRID_PATTERNS = [(n, ell, r) for n in range(2, 8) for ell in range(n + 1) for r in range(n - ell + 1) if ell + r]


def grid_instance(index):
    """Seeded model with orthonormal observation rows, cycling through every (n, ell, r) pattern."""
    n, ell, r = GRID_PATTERNS[index % len(GRID_PATTERNS)]
    T = 1 + index % 6
    rng = np.random.default_rng(index)
    model = make_model(n, ell, r, T, seed=index)
    Cmat = tuple(np.linalg.qr(rng.standard_normal((n, n)))[0][:ell + r] for _ in range(T + 1))
    model = dataclasses.replace(model, Cmat=Cmat)
    _, y = simulate(model, seed=index + 1000)
    return model, y


@pytest.mark.slow
class TestDenseOracleGrid:
    @pytest.mark.parametrize("index", range(200))
    def test_filter_and_smoother(self, index):
        model, y = grid_instance(index)
        red = reduce_model(model)
        out = filter(red, y, store_backward=True)
        y_c, _ = transform_observations(red, y)

        for t in range(model.T + 1):
            ref = oracle(model, y, t)
            mean, cov = ref.state(t)
            full = reconstruct_state(red, t, out.filter_marginals[t], y_c[t])
            close(full.mean, mean)
            close(full.cov, cov)
            partial = EstimationOutput(out.filter_marginals[:t + 1], out.loglik_increments[:t + 1])
            assert partial.loglik == pytest.approx(ref.logdensity, abs=1e-8)

        smoothed = reconstruct_all(red, smooth(red, out), y)
        for t in range(model.T + 1):
            mean, cov = ref.state(t)
            close(smoothed.reconstructed[t].mean, mean)
            close(smoothed.reconstructed[t].cov, cov)

    def test_patterns_include_fully_observed_states(self):
        assert {(n, n, 0) for n in range(2, 8)} <= set(GRID_PATTERNS)


class TestReconstructAll:
    def test_axis_aligned(self):
        red = reduce_model(axis_aligned_model(T=1))
        out = reconstruct_all(red, filter(red, np.array([[2.0], [3.0]])), np.array([[2.0], [3.0]]))
        assert_allclose(out.reconstructed[0].mean, [2.0, 0.0], atol=1e-15)
        assert_allclose(out.reconstructed[1].mean, [3.0, 0.0], atol=1e-15)

    def test_rank(self, instance):
        model, y = instance
        red = reduce_model(model)
        out = reconstruct_all(red, smooth(red, filter(red, y, store_backward=True)), y)
        for full in out.reconstructed:
            assert full.cov_factor.shape == (model.n, model.n - model.ell)
            singular = np.linalg.svd(full.cov, compute_uv=False)
            assert np.all(singular[model.n - model.ell:] <= 1e-12 * singular[0])


class TestSamplePosterior:
    def test_shape_and_mean(self, instance):
        model, y = instance
        red = reduce_model(model)
        out = smooth(red, filter(red, y, store_backward=True))
        draws = sample_posterior(out, np.random.default_rng(0), num_samples=4000)
        assert draws.shape == (4000, model.T + 1, model.n - model.ell)

        for t, marginal in enumerate(out.smooth_marginals):
            stderr = np.sqrt(np.diagonal(marginal.cov) / 4000)
            assert np.all(np.abs(draws[:, t].mean(axis=0) - marginal.mean) <= 5 * stderr + 1e-12)

    def test_needs_backward_kernels(self, instance):
        model, y = instance
        with pytest.raises(DimensionMismatch):
            sample_posterior(filter(reduce_model(model), y), np.random.default_rng(0))


class TestEstimationTable:
    def test_columns_and_trailer(self, instance):
        model, y = instance
        out = filter(reduce_model(model), y)
        frame = estimation_table(out.filter_marginals, out.loglik_increments)
        k = model.n - model.ell
        assert len(frame) == model.T + 2
        assert frame["t"].iloc[-1] == "total"
        assert frame["loglik_total"].iloc[-1] == out.loglik
        assert f"factor{k - 1}_{k - 1}" in frame.columns and f"mean{k - 1}" in frame.columns

    def test_without_loglik(self):
        red = reduce_model(axis_aligned_model(T=0))
        out = filter(red, np.array([[1.0]]))
        frame = estimation_table(out.filter_marginals)
        assert list(frame.columns) == ["t", "mean0", "factor0_0"]
        assert frame["factor0_0"].iloc[0] == pytest.approx(1.0)
        assert math.isclose(frame["mean0"].iloc[0], 0.0, abs_tol=1e-15)
