"""Tests for the log-partition diagnostics: derivative formulas, the
Bregman-gap identity, sandwich/ratio/kappa bounds, and fixed-point checks."""

import math

import numpy as np
import pytest

from expgrad import (
    DensityState,
    FixedPointResult,
    HermitianOperator,
    InvalidInput,
    LogPartitionProbe,
    bregman_gap,
    chi,
    eg_step,
    fixed_point_check,
    inner_product_check,
    kappa_bound_check,
    phi,
    phi_derivatives,
    phi_fd_derivatives,
    qst_objective,
    quadratic_objective,
    quantum_relative_entropy,
    random_density,
    random_hermitian,
    random_probe,
    ratio_monotonicity_check,
    run_suite,
    sandwich_check,
    self_concordance_check,
    standard_basis_ensemble,
)


def constant_direction_probe(d, c):
    rng = np.random.default_rng(99)
    return LogPartitionProbe(random_density(rng, d), HermitianOperator.identity(d) * c)


class TestChi:
    def test_at_one(self):
        assert chi(1.0) == pytest.approx(1.0, abs=1e-15)

    def test_small_argument_quadratic(self):
        for x in (1e-3, 1e-5, 1e-7):
            assert chi(x) == pytest.approx(x * x / 2.0, rel=1e-3)

    def test_positive_for_positive_argument(self):
        for x in np.geomspace(1e-8, 50.0, 30):
            assert chi(x) > 0.0


class TestProbe:
    def test_dimension_mismatch(self):
        rng = np.random.default_rng(1)
        with pytest.raises(InvalidInput):
            LogPartitionProbe(random_density(rng, 2), random_hermitian(rng, 3))

    def test_delta_is_spectral_width(self):
        p = LogPartitionProbe(DensityState.maximally_mixed(2),
                              HermitianOperator.diag([-1.0, 3.0]))
        assert p.delta == pytest.approx(4.0)

    def test_weights_are_gibbs(self):
        rng = np.random.default_rng(2)
        p = random_probe(rng, 4, "hermitian")
        for alpha in (0.0, 0.4, 2.0):
            w = p.weights(alpha)
            assert np.all(w > 0.0)
            assert np.sum(w) == pytest.approx(1.0, abs=1e-12)

    def test_weights_at_zero_are_base_populations(self):
        # commuting case: weights(0) are the base eigenvalues grouped by
        # direction eigenvalue
        base = DensityState.from_matrix(np.diag([0.1, 0.3, 0.6]))
        p = LogPartitionProbe(base, HermitianOperator.diag([1.0, 1.0, 2.0]))
        w = p.weights(0.0)
        assert np.allclose(np.sort(w), [0.4, 0.6], atol=1e-12)


class TestPhi:
    def test_zero_at_origin(self):
        rng = np.random.default_rng(3)
        for d in (2, 3, 5):
            p = random_probe(rng, d, "hermitian")
            assert phi(p, 0.0) == pytest.approx(0.0, abs=1e-12)

    def test_constant_direction_is_linear(self):
        p = constant_direction_probe(3, 1.7)
        for alpha in (-2.0, 0.5, 4.0):
            assert phi(p, alpha) == pytest.approx(1.7 * alpha, abs=1e-10)

    def test_convex_on_grid(self):
        rng = np.random.default_rng(4)
        p = random_probe(rng, 4, "qst")
        grid = np.linspace(-2.0, 2.0, 21)
        vals = np.array([phi(p, a) for a in grid])
        second = vals[:-2] - 2.0 * vals[1:-1] + vals[2:]
        assert np.all(second >= -1e-10)


class TestPhiDerivatives:
    def test_constant_direction(self):
        p = constant_direction_probe(3, 2.5)
        d1, d2, d3 = phi_derivatives(p, 0.8)
        assert d1 == pytest.approx(2.5, abs=1e-12)
        assert d2 == pytest.approx(0.0, abs=1e-10)
        assert d3 == pytest.approx(0.0, abs=1e-8)

    def test_against_finite_differences(self):
        rng = np.random.default_rng(5)
        for kind in ("qst", "hermitian"):
            p = random_probe(rng, 4, kind)
            analytic = np.array(phi_derivatives(p, 0.3))
            best = np.full(3, math.inf)
            for h in (1e-4, 1e-3, 1e-2):
                fd = np.array(phi_fd_derivatives(p, 0.3, h))
                best = np.minimum(best, np.abs(fd - analytic)
                                  / np.maximum(1.0, np.abs(analytic)))
            assert np.all(best <= 1e-5)

    def test_diagonal_closed_form(self):
        # diagonal 2x2 case: phi'' and phi''' are the Bernoulli variance and
        # third central moment of the direction eigenvalues under the Gibbs
        # weights of H_alpha
        base = DensityState.from_matrix(np.diag([0.7, 0.3]))
        g = np.array([1.3, -0.4])
        p = LogPartitionProbe(base, HermitianOperator.diag(g))
        alpha = 0.6
        h = base.exponent.mat.diagonal().real + alpha * g
        w = np.exp(h - np.max(h))
        w = w / np.sum(w)
        mean = float(w @ g)
        var = float(w[0] * w[1]) * (g[0] - g[1]) ** 2
        third = float(w[0] * w[1] * (w[1] - w[0])) * (g[0] - g[1]) ** 3
        d1, d2, d3 = phi_derivatives(p, alpha)
        assert d1 == pytest.approx(mean, abs=1e-10)
        assert d2 == pytest.approx(var, abs=1e-10)
        assert d3 == pytest.approx(third, abs=1e-10)

    def test_variance_bounded_by_width(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            p = random_probe(rng, 3, "hermitian")
            for alpha in (0.05, 0.5, 2.0):
                _, var, _ = phi_derivatives(p, alpha)
                assert var <= p.delta ** 2 / 4.0 + 1e-10


class TestBregmanGap:
    def test_rejects_nonpositive_step(self):
        p = constant_direction_probe(2, 1.0)
        with pytest.raises(InvalidInput):
            bregman_gap(p, 0.0)

    def test_constant_direction_is_zero(self):
        p = constant_direction_probe(3, -0.8)
        assert bregman_gap(p, 1.3) == pytest.approx(0.0, abs=1e-12)

    def test_matches_relative_entropy(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            p = random_probe(rng, 4, "qst")
            for alpha in (0.1, 0.7, 2.0):
                direct = quantum_relative_entropy(
                    eg_step(p.base, -p.direction, alpha), p.base)
                assert bregman_gap(p, alpha) == pytest.approx(
                    direct, rel=1e-8, abs=1e-12)

    def test_nonnegative(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            p = random_probe(rng, 3, "hermitian")
            assert bregman_gap(p, 0.9) >= -1e-12


class TestSandwich:
    def test_ordering_on_random_probes(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            p = random_probe(rng, 4, "qst")
            for alpha in (0.1, 1.0, 5.0):
                res = sandwich_check(p, alpha)
                assert res.lower - 1e-9 <= res.gap <= res.upper + 1e-9
                assert res.lower >= -1e-12

    def test_tight_for_small_steps(self):
        # both bounds approach alpha^2 phi''/2 as alpha -> 0
        rng = np.random.default_rng(10)
        p = random_probe(rng, 3, "hermitian")
        alpha = 1e-4
        _, var, _ = phi_derivatives(p, alpha)
        leading = alpha * alpha * var / 2.0
        res = sandwich_check(p, alpha)
        assert res.lower == pytest.approx(leading, rel=1e-3)
        assert res.upper == pytest.approx(leading, rel=1e-3)
        assert res.gap == pytest.approx(leading, rel=1e-3)

    def test_degenerate_direction(self):
        res = sandwich_check(constant_direction_probe(2, 0.7), 1.0)
        assert res.degenerate
        assert res.lower == res.gap == res.upper == 0.0


class TestRatioMonotonicity:
    def test_non_increasing_on_random_probes(self):
        rng = np.random.default_rng(11)
        grid = np.geomspace(1e-3, 10.0, 25)
        for _ in range(15):
            p = random_probe(rng, 3, "qst")
            res = ratio_monotonicity_check(p, grid)
            assert res.non_increasing, res.worst_violation

    def test_small_step_limit(self):
        # as alpha -> 0 the ratio tends to phi''(0) / Delta^2
        rng = np.random.default_rng(12)
        p = random_probe(rng, 4, "hermitian")
        res = ratio_monotonicity_check(p, [1e-4, 1e-3])
        _, var0, _ = phi_derivatives(p, 0.0)
        assert res.ratios[0] == pytest.approx(var0 / p.delta ** 2, rel=1e-2)

    def test_rejects_bad_grid(self):
        p = constant_direction_probe(2, 1.0)
        for grid in ([], [0.0, 1.0], [1.0, 0.5]):
            with pytest.raises(InvalidInput):
                ratio_monotonicity_check(p, grid)

    def test_degenerate_direction(self):
        res = ratio_monotonicity_check(constant_direction_probe(2, 1.0), [0.5, 1.0])
        assert res.degenerate and res.non_increasing


class TestKappaBound:
    def test_point_value(self):
        # Delta = 1, alpha_bar = 1: kappa = 1 / (2 chi(1)) = 0.5
        p = LogPartitionProbe(DensityState.maximally_mixed(2),
                              HermitianOperator.diag([0.0, 1.0]))
        res = kappa_bound_check(p, 1.0, [0.5, 1.0])
        assert res.kappa == pytest.approx(0.5, abs=1e-12)

    def test_holds_on_random_probes(self):
        rng = np.random.default_rng(13)
        grid = np.linspace(0.05, 1.0, 20)
        for _ in range(15):
            p = random_probe(rng, 3, "qst")
            res = kappa_bound_check(p, 1.0, grid)
            assert res.holds, res.worst_margin

    def test_kappa_alpha_bar_squared_at_most_one(self):
        # kappa abar^2 = (D abar)^2 / (2 chi(D abar)) <= 1 since chi(x) >= x^2/2
        rng = np.random.default_rng(14)
        for abar in (0.3, 1.0, 4.0):
            p = random_probe(rng, 3, "hermitian")
            res = kappa_bound_check(p, abar, [abar / 2, abar])
            assert res.kappa * abar * abar <= 1.0 + 1e-12

    def test_rejects_grid_outside_range(self):
        p = constant_direction_probe(2, 1.0)
        with pytest.raises(InvalidInput):
            kappa_bound_check(p, 1.0, [0.5, 1.5])


class TestInnerProduct:
    def test_nonnegative_on_random_instances(self):
        rng = np.random.default_rng(15)
        f = qst_objective(standard_basis_ensemble(3))
        for _ in range(10):
            rho = random_density(rng, 3)
            for alpha in (0.1, 1.0, 3.0):
                assert inner_product_check(rho, f, alpha) >= -1e-10

    def test_small_step_limit_is_gradient_norm_like(self):
        # as alpha -> 0 the margin tends to 0 (both sides vanish linearly)
        rng = np.random.default_rng(16)
        f = qst_objective(standard_basis_ensemble(2))
        rho = random_density(rng, 2)
        assert abs(inner_product_check(rho, f, 1e-6)) <= 1e-4


class TestFixedPoint:
    def test_optimum_is_fixed(self):
        f = qst_objective(standard_basis_ensemble(2))
        res = fixed_point_check(DensityState.maximally_mixed(2), f, (0.1, 1.0, 3.0))
        assert isinstance(res, FixedPointResult)
        assert res.is_fixed_point
        assert res.optimality_margin >= -1e-8

    def test_non_optimum_moves(self):
        f = qst_objective(standard_basis_ensemble(2))
        rho = DensityState.from_matrix(np.diag([0.9, 0.1]))
        res = fixed_point_check(rho, f, (0.1, 1.0))
        assert not res.is_fixed_point
        assert res.optimality_margin is None

    def test_quadratic_target_is_fixed(self):
        rng = np.random.default_rng(17)
        target = random_density(rng, 3)
        f = quadratic_objective(HermitianOperator(target.matrix))
        res = fixed_point_check(target, f, (0.5, 1.0), rng)
        assert res.is_fixed_point and res.optimality_margin >= -1e-8


class TestSelfConcordance:
    def test_degenerate_direction(self):
        worst = self_concordance_check(constant_direction_probe(3, 1.0), [0.5, 1.0])
        assert worst <= 1e-10

    def test_holds_on_random_probes(self):
        rng = np.random.default_rng(18)
        grid = np.geomspace(1e-3, 10.0, 25)
        for kind in ("qst", "hermitian"):
            for _ in range(10):
                p = random_probe(rng, 4, kind)
                assert self_concordance_check(p, grid) <= 1e-10


class TestSuites:
    def test_all_pass_on_small_population(self):
        records = run_suite("all", 8, 123)
        assert len(records) == 6 * 8
        assert all(r["pass"] for r in records)

    def test_single_suite_shape(self):
        records = run_suite("kappa", 4, 5)
        assert [r["check"] for r in records] == ["kappa"] * 4
        assert {r["dim"] for r in records} <= {2, 3, 5, 8}

    def test_deterministic(self):
        assert run_suite("sandwich", 3, 9) == run_suite("sandwich", 3, 9)

    def test_rejects_unknown_suite(self):
        with pytest.raises(InvalidInput):
            run_suite("nope", 1, 0)

    def test_rejects_zero_samples(self):
        with pytest.raises(InvalidInput):
            run_suite("ratio", 0, 0)
