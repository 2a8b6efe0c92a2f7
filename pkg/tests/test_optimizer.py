"""Tests for the worst-case description length maximization."""

import math

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from conftest import final_trace_row
from markovcoding.optimizer import (
    NonConvergenceError,
    assemble_L,
    build_ck,
    ell,
    maximize_s1,
    objective,
    objective_gradient,
)
from markovcoding.rates import binary_entropy, l_check, series_from


def _scalar_reduction_peak():
    """Best value of the K=1, M=4 problem reduced to the last coordinate.

    With mass x on the last coordinate the entropy part is maximized by
    pushing the rest onto the first coordinate, leaving a one dimensional
    concave profile that a bounded scalar search pins down to 1e-14.
    """
    def profile(x):
        t = min(0.5, 1.0 - 0.75 * x)
        val = binary_entropy(t) if 0.0 < t < 1.0 else 0.0
        if x > 0.0:
            val -= (x / 2.0) * math.log2(x / 4.0)
        return val

    res = minimize_scalar(lambda x: -profile(x), bounds=(0.0, 1.0),
                          method="bounded", options={"xatol": 1e-14})
    return -res.fun, res.x


def _dirichlet_points(count, M, seed):
    rng = np.random.default_rng(seed)
    return rng.dirichlet(np.ones(M), size=count)


class TestBuildCk:
    """Column-stochastic truncation matrices."""

    def test_two_by_three_rows(self):
        ck = build_ck(1, 3)
        assert ck.rows[0].tolist() == [1, 1 / 2, 1 / 3]
        assert ck.rows[1].tolist() == [0, 1 / 2, 2 / 3]

    def test_tail_row_column(self):
        ck = build_ck(2, 4)
        assert ck.rows[:, 3].tolist() == [1 / 4, 1 / 4, 1 / 2]

    def test_columns_are_distributions(self):
        for k, M in [(1, 4), (3, 7), (5, 20)]:
            ck = build_ck(k, M)
            np.testing.assert_allclose(ck.rows.sum(axis=0), 1.0, atol=1e-15)
            assert ck.rows.min() >= 0.0

    def test_rejects_short_support(self):
        with pytest.raises(ValueError):
            build_ck(3, 3)


class TestObjective:
    """Weighted entropy sums over the simplex."""

    def test_two_point_image_is_one_bit(self):
        a = np.zeros(4)
        a[1] = 1.0
        assert objective(a, 0.3, 1, 4) == pytest.approx(0.09, abs=1e-15)

    def test_point_image_is_free(self):
        a = np.zeros(4)
        a[0] = 1.0
        assert objective(a, 0.3, 1, 4) == 0.0

    def test_zero_error_rate_is_free(self):
        assert objective(np.full(8, 1 / 8), 0.0, 2, 8) == 0.0

    def test_matches_matrix_entropy_when_correction_sleeps(self):
        # with no mass on the last coordinate the value is exactly
        # sum_k p^2 (1-p)^(k-1) H(C_k a)
        rng = np.random.default_rng(7)
        p, K, M = 0.25, 4, 12
        for _ in range(10):
            a = np.append(rng.dirichlet(np.ones(M - 1)), 0.0)
            direct = math.fsum(
                p * p * (1 - p) ** (k - 1) * _entropy(build_ck(k, M).rows @ a)
                for k in range(1, K + 1))
            assert objective(a, p, K, M) == pytest.approx(direct, rel=1e-12)

    def test_last_coordinate_adds_positive_correction(self):
        p, K, M = 0.2, 3, 9
        a = np.full(M, 1.0 / M)
        direct = math.fsum(
            p * p * (1 - p) ** (k - 1) * _entropy(build_ck(k, M).rows @ a)
            for k in range(1, K + 1))
        assert objective(a, p, K, M) > direct

    def test_rejects_off_simplex_points(self):
        with pytest.raises(ValueError):
            objective(np.full(4, 0.3), 0.1, 1, 4)
        with pytest.raises(ValueError):
            objective(np.array([1.5, -0.5, 0.0, 0.0]), 0.1, 1, 4)
        with pytest.raises(ValueError):
            objective(np.full(3, 1 / 3), 0.1, 1, 4)

    def test_rejects_bad_configuration(self):
        with pytest.raises(ValueError):
            objective(np.full(4, 0.25), 1.5, 1, 4)
        with pytest.raises(ValueError):
            objective(np.full(4, 0.25), 0.1, 4, 4)


def _entropy(q):
    return math.fsum(-x * math.log2(x) for x in q if x > 0)


class TestGradient:
    """Analytic gradient against directional finite differences."""

    def test_matches_finite_differences(self):
        p, K, M = 0.3, 5, 20
        h = 1e-7
        for a in _dirichlet_points(8, M, seed=3):
            a = 0.5 * a + 0.5 / M
            grad = objective_gradient(a, p, K, M)
            rng = np.random.default_rng(11)
            for _ in range(5):
                i, j = rng.choice(M, size=2, replace=False)
                d = np.zeros(M)
                d[i], d[j] = 1.0, -1.0
                fd = (objective(a + h * d, p, K, M)
                      - objective(a - h * d, p, K, M)) / (2 * h)
                assert grad @ d == pytest.approx(fd, abs=1e-6 * max(1.0, abs(fd)))

    def test_boundary_slope_is_sentinel_large(self):
        a = np.append(np.full(7, 1 / 7), 0.0)
        grad = objective_gradient(a, 0.2, 2, 8)
        assert grad[-1] > 1e100


class TestMaximizeS1:
    """Certified simplex maximization."""

    def test_small_instance_matches_scalar_reduction(self):
        peak, arg = _scalar_reduction_peak()
        res = maximize_s1(0.3, 1, 4, tol=1e-9)
        assert res.value / 0.09 == pytest.approx(peak, abs=1e-8)
        assert res.argmax[-1] == pytest.approx(arg, abs=1e-6)
        assert res.argmax[1] == pytest.approx(0.0, abs=1e-9)
        assert res.argmax[2] == pytest.approx(0.0, abs=1e-9)

    def test_frozen_small_instance_value(self):
        res = maximize_s1(0.3, 1, 4, tol=1e-9)
        assert res.value / 0.09 == pytest.approx(1.899721925847416, abs=1e-9)

    def test_certificate_dominates_feasible_points(self):
        p, K, M = 0.35, 6, 24
        res = maximize_s1(p, K, M, tol=1e-8)
        upper = res.value + res.gap
        for a in _dirichlet_points(100, M, seed=19):
            assert objective(a, p, K, M) <= upper + 1e-12

    def test_gap_within_tolerance(self):
        res = maximize_s1(0.2, 4, 16, tol=1e-9)
        assert 0.0 <= res.gap <= 1e-9

    def test_default_support_is_four_classes_wide(self):
        assert maximize_s1(0.2, 3, tol=1e-6).argmax.size == 12

    def test_zero_rate_short_circuits(self, tmp_path):
        trace = tmp_path / "trace.csv"
        res = maximize_s1(0.0, 5, 20, trace_path=trace)
        assert res.value == 0.0 and res.gap == 0.0 and res.iterations == 0
        np.testing.assert_allclose(res.argmax, 1 / 20)
        assert not trace.exists()

    def test_iteration_budget_enforced(self):
        with pytest.raises(NonConvergenceError) as exc:
            maximize_s1(0.3, 5, 20, max_iter=1)
        assert exc.value.result.iterations == 1
        assert exc.value.result.gap > 0.0

    def test_trace_records_final_certificate(self, tmp_path):
        trace = tmp_path / "trace.csv"
        res = maximize_s1(0.3, 3, 12, tol=1e-8, trace_path=trace)
        with trace.open() as fh:
            header = fh.readline().strip()
        assert header == "iteration,value,gap"
        value, gap = final_trace_row(trace)
        assert value == res.value and gap == res.gap

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError):
            maximize_s1(-0.1, 2, 8)
        with pytest.raises(ValueError):
            maximize_s1(0.2, 2, 2)
        with pytest.raises(ValueError):
            maximize_s1(0.2, 2, 8, tol=0.0)


class TestAssembledBounds:
    """Combined certified value, gap, and tail."""

    def test_includes_gap_and_tail(self):
        p, K, M = 0.25, 6, 24
        res = maximize_s1(p, K, M, tol=1e-7)
        total = assemble_L(p, K, M, tol=1e-7)
        tail = series_from(p, K + 1, 1e-12)
        assert tail > 0.0
        assert total == pytest.approx(res.value + res.gap + tail, rel=1e-12)

    def test_stays_below_series_bound(self):
        p = 0.3
        assert assemble_L(p, 40, 160) <= l_check(p)

    def test_error_rate_reparametrization(self):
        eps = 0.1
        assert ell(eps, 8, 32) == assemble_L(eps * (2.0 - eps), 8, 32)

    def test_frozen_production_scale_value(self):
        assert ell(0.005, 100, 400) == pytest.approx(0.05555168837972932,
                                                     abs=1e-6)
        assert ell(0.005, 100, 400) <= l_check(0.005 * (2.0 - 0.005))

    def test_rejects_bad_error_rate(self):
        with pytest.raises(ValueError):
            ell(1.2, 4, 16)
