"""Optimal weighted error-losses, bound chains, products, and the exponent."""

import math

import numpy as np
import pytest

from winfer.core import Distribution, IntegrationConfig, WeightFunction
from winfer.divergence import HypothesisProblem, kl, weight_mass
from winfer.errors import EnumerationTooLargeError, InfiniteKLError
from winfer.randinst import random_finite_problem, random_interior_finite_problem
from winfer.testing import (
    DecisionRule,
    ProductProblem,
    TiltedPair,
    error_bound_report,
    error_losses,
    min_total_error,
    nfold_error_bounds,
    optimal_rule,
    product_problem_explicit,
    stein_sanov_empirical,
    stein_sanov_limit,
)

CFG = IntegrationConfig()


def binary_problem():
    return HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                             Distribution.from_pmf([0.25, 0.75]),
                             WeightFunction.table([2.0, 1.0]))


class TestErrorLosses:
    def test_never_reject(self):
        prob = binary_problem()
        a, b = error_losses(prob, DecisionRule(values=np.zeros(2)), CFG)
        assert a == 0.0
        assert b == pytest.approx(weight_mass(prob.q, prob.wf, CFG), abs=1e-15)

    def test_always_reject(self):
        prob = binary_problem()
        a, b = error_losses(prob, DecisionRule(values=np.ones(2)), CFG)
        assert a == pytest.approx(weight_mass(prob.p, prob.wf, CFG), abs=1e-15)
        assert b == 0.0

    def test_hand_evaluated_indicator(self):
        prob = binary_problem()
        a, b = error_losses(prob, optimal_rule(prob), CFG)
        assert (a, b) == (pytest.approx(0.5), pytest.approx(0.5))

    def test_rule_range_validated(self):
        with pytest.raises(Exception):
            DecisionRule(values=np.array([0.5, 1.5]))

    def test_continuous_rule(self):
        prob = HypothesisProblem(Distribution.gaussian(0.0, 1.0),
                                 Distribution.gaussian(2.0, 1.0),
                                 WeightFunction.constant(1.0))
        a, b = error_losses(prob, optimal_rule(prob), CFG)
        # indicator of x > 1: alpha = P(N(0,1) > 1), beta = P(N(2,1) <= 1)
        from scipy.stats import norm
        assert a == pytest.approx(norm.sf(1.0), rel=1e-8)
        assert b == pytest.approx(norm.cdf(-1.0), rel=1e-8)


class TestOptimalRule:
    def test_identical_densities_never_reject(self):
        p = Distribution.from_pmf([0.5, 0.5])
        rule = optimal_rule(HypothesisProblem(p, p, WeightFunction.constant(1.0)))
        np.testing.assert_array_equal(rule.values, [0.0, 0.0])

    def test_componentwise_comparison(self):
        rule = optimal_rule(binary_problem())
        np.testing.assert_array_equal(rule.values, [0.0, 1.0])

    def test_gaussian_midpoint_threshold(self):
        prob = HypothesisProblem(Distribution.gaussian(0.0, 1.0),
                                 Distribution.gaussian(2.0, 1.0),
                                 WeightFunction.absolute())
        rule = optimal_rule(prob)
        assert rule(np.array([0.9]))[0] == 0.0
        assert rule(np.array([1.1]))[0] == 1.0


class TestMinTotalError:
    def test_identical_unit_weight(self):
        p = Distribution.from_pmf([0.5, 0.5])
        prob = HypothesisProblem(p, p, WeightFunction.constant(1.0))
        assert min_total_error(prob, CFG) == pytest.approx(1.0, abs=1e-12)

    def test_brute_force_over_deterministic_rules(self):
        prob = binary_problem()
        p, q, w = prob.tables()
        best = min(float(np.sum(w * p * d) + np.sum(w * q * (1 - d)))
                   for d in (np.array(b) for b in
                             ([0, 0], [0, 1], [1, 0], [1, 1])))
        assert best == pytest.approx(1.0)
        assert min_total_error(prob, CFG) == pytest.approx(best, abs=1e-12)

    def test_perfectly_separable(self):
        prob = HypothesisProblem(Distribution.from_pmf([1.0, 0.0]),
                                 Distribution.from_pmf([0.0, 1.0]),
                                 WeightFunction.constant(1.0))
        assert min_total_error(prob, CFG) == pytest.approx(0.0, abs=1e-12)

    def test_randomized_rules_never_beat_it(self):
        rng = np.random.default_rng(17)
        for _ in range(25):
            prob = random_finite_problem(rng, 5)
            floor = min_total_error(prob, CFG)
            for _ in range(10):
                d = DecisionRule(values=rng.uniform(0, 1, 5))
                a, b = error_losses(prob, d, CFG)
                assert a + b >= floor - 1e-12


class TestBoundReport:
    def test_identical_unit_weight_collapse(self):
        p = Distribution.from_pmf([0.5, 0.5])
        rep = error_bound_report(HypothesisProblem(p, p, WeightFunction.constant(1.0)), CFG)
        assert rep.delta == pytest.approx(1.0)
        assert rep.rho == pytest.approx(1.0)
        assert rep.lower_affinity == pytest.approx(0.5)
        assert rep.lower_sqrt == pytest.approx(1.0)
        assert rep.min_total == pytest.approx(1.0)
        assert rep.chain_ok

    def test_random_sweep_chain_holds(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            rep = error_bound_report(random_finite_problem(rng, 6), CFG)
            chain = [v for v in rep.violations if "bretagnolle" not in v
                     and "pinsker" not in v]
            assert not chain, rep.violations

    def test_gaussian_unit_weight_bh(self):
        prob = HypothesisProblem(Distribution.gaussian(0.0, 1.0),
                                 Distribution.gaussian(3.0, 1.0),
                                 WeightFunction.constant(1.0))
        rep = error_bound_report(prob, CFG)
        assert rep.kl == pytest.approx(4.5, rel=1e-9)
        assert rep.bh_printed_bound == pytest.approx(math.sqrt(1 - math.exp(-4.5)), rel=1e-9)
        assert rep.tau <= rep.bh_printed_bound
        assert rep.tau <= rep.bh_corrected_bound

    def test_small_constant_weight_breaks_printed_bh_only(self):
        # with phi = c < 1 the unit-mass form tau^2 + e^{-K} <= Delta^2 fails;
        # the weight-mass-aware form still holds
        prob = HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                                 Distribution.from_pmf([0.25, 0.75]),
                                 WeightFunction.constant(0.1))
        rep = error_bound_report(prob, CFG)
        assert not rep.bh_printed_applicable
        assert math.isnan(rep.bh_printed_bound) or rep.tau > rep.bh_printed_bound
        assert rep.tau <= rep.bh_corrected_bound
        assert rep.chain_ok


class TestNfoldBounds:
    def test_reduces_at_n_one(self):
        prob = binary_problem()
        b = nfold_error_bounds(ProductProblem(prob, 1), CFG)
        rep = error_bound_report(prob, CFG)
        assert b.exact_inf == pytest.approx(rep.min_total, abs=1e-12)
        assert b.lower == pytest.approx(rep.rho ** 2 / (2 * rep.delta), abs=1e-12)
        assert b.upper == pytest.approx(rep.rho, abs=1e-12)

    def test_binary_tenfold_sandwich(self):
        prob = HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                                 Distribution.from_pmf([0.25, 0.75]),
                                 WeightFunction.constant(1.0))
        b = nfold_error_bounds(ProductProblem(prob, 10), CFG)
        assert b.exact_inf is not None
        assert b.lower <= b.exact_inf <= b.upper
        assert b.upper == pytest.approx(b.rho ** 10, abs=1e-12)

    def test_small_delta_exponential_bound(self):
        rng = np.random.default_rng(11)
        checked = 0
        for _ in range(40):
            prob = random_finite_problem(rng, 3, weight_span=0.4)
            b = nfold_error_bounds(ProductProblem(prob, int(rng.integers(2, 8))), CFG)
            if b.upper_eta is not None and b.exact_inf is not None:
                checked += 1
                assert b.exact_inf <= b.upper_eta + 1e-12
        assert checked > 0

    def test_product_cap(self):
        prob = HypothesisProblem(Distribution.from_pmf(np.full(10, 0.1)),
                                 Distribution.from_pmf(np.full(10, 0.1)),
                                 WeightFunction.constant(1.0))
        with pytest.raises(EnumerationTooLargeError):
            product_problem_explicit(ProductProblem(prob, 12))
        b = nfold_error_bounds(ProductProblem(prob, 12), CFG)
        assert b.exact_inf is None and b.exact_error == "product-too-large"

    def test_product_tables_are_consistent(self):
        prob = binary_problem()
        full = product_problem_explicit(ProductProblem(prob, 3))
        assert full.support.m == 8
        p, q, w = full.tables()
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        # spot outcome (0,1,1): p = .5^3, q = .25*.75^2, w = 2*1*1
        assert p[3] == pytest.approx(0.125)
        assert q[3] == pytest.approx(0.25 * 0.75 * 0.75)
        assert w[0] == pytest.approx(8.0) and w[7] == pytest.approx(1.0)


class TestTiltedPair:
    def test_normalization_and_means(self):
        prob = binary_problem()
        tp = TiltedPair.from_problem(prob, CFG)
        assert tp.pi.sum() == pytest.approx(1.0, abs=1e-12)
        assert tp.vartheta.sum() == pytest.approx(1.0, abs=1e-12)
        kv_pq = kl(prob, CFG).value
        kv_qp = kl(prob.swapped(), CFG).value
        assert tp.mean_pi == pytest.approx(kv_pq / tp.ep, abs=1e-12)
        assert tp.mean_vartheta == pytest.approx(-kv_qp / tp.eq, abs=1e-12)

    def test_requires_interior_pmfs(self):
        prob = HypothesisProblem(Distribution.from_pmf([1.0, 0.0]),
                                 Distribution.from_pmf([0.5, 0.5]),
                                 WeightFunction.constant(1.0))
        with pytest.raises(InfiniteKLError):
            TiltedPair.from_problem(prob, CFG)


class TestSteinSanov:
    def test_limit_unit_weight_is_minus_kl(self):
        prob = HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                                 Distribution.from_pmf([0.25, 0.75]),
                                 WeightFunction.constant(1.0))
        assert stein_sanov_limit(prob, CFG) == pytest.approx(
            -kl(prob, CFG).value, abs=1e-12)

    def test_limit_identical_is_log_mass(self):
        p = Distribution.from_pmf([0.5, 0.5])
        prob = HypothesisProblem(p, p, WeightFunction.table([2.0, 1.0]))
        assert stein_sanov_limit(prob, CFG) == pytest.approx(math.log(1.5), abs=1e-12)

    def test_limit_weighted_hand_value(self):
        # ln E_phi(p) - K / E_phi(p) from exact sums
        prob = HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                                 Distribution.from_pmf([0.25, 0.75]),
                                 WeightFunction.table([2.0, 1.0]))
        ep = 1.5
        kv = 2 * 0.5 * math.log(2.0) + 0.5 * math.log(2.0 / 3.0)
        assert stein_sanov_limit(prob, CFG) == pytest.approx(
            math.log(ep) - kv / ep, abs=1e-12)

    def test_infinite_kl_rejected(self):
        prob = HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                                 Distribution.from_pmf([1.0, 0.0]),
                                 WeightFunction.constant(1.0))
        with pytest.raises(InfiniteKLError):
            stein_sanov_limit(prob, CFG)

    def test_identical_rate_is_log_mass_exactly(self):
        p = Distribution.from_pmf([0.5, 0.5])
        prob = HypothesisProblem(p, p, WeightFunction.table([2.0, 1.0]))
        est = stein_sanov_empirical(ProductProblem(prob, 60), 0.05, "exact", CFG)
        assert est.rate_estimate == pytest.approx(math.log(1.5), abs=1e-12)
        assert est.alpha_attained == pytest.approx(0.0, abs=1e-12)

    def test_binary_plain_rate_near_limit(self):
        prob = HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                                 Distribution.from_pmf([0.25, 0.75]),
                                 WeightFunction.constant(1.0))
        est = stein_sanov_empirical(ProductProblem(prob, 100), 0.05, "exact", CFG)
        assert abs(est.rate_estimate - est.limit) <= 0.05 + 0.05

    def test_binary_weighted_rate_near_limit(self):
        prob = binary_problem()
        est = stein_sanov_empirical(ProductProblem(prob, 100), 0.05, "exact", CFG)
        assert est.limit == pytest.approx(stein_sanov_limit(prob, CFG), abs=1e-12)
        assert abs(est.rate_estimate - est.limit) <= 0.05 + 0.05

    def test_monte_carlo_tracks_exact(self):
        prob = binary_problem()
        pp = ProductProblem(prob, 80)
        exact = stein_sanov_empirical(pp, 0.1, "exact", CFG)
        mc = stein_sanov_empirical(pp, 0.1, "mc", CFG, mc_samples=150_000, mc_seed=5)
        assert mc.rate_estimate == pytest.approx(exact.rate_estimate, abs=5e-3)
        assert mc.alpha_attained == pytest.approx(exact.alpha_attained, abs=5e-3)

    def test_zero_weight_symbol_handled(self):
        # a vanishing weight entry zeroes those count vectors, not the rate
        prob = HypothesisProblem(Distribution.from_pmf([0.4, 0.3, 0.3]),
                                 Distribution.from_pmf([0.3, 0.4, 0.3]),
                                 WeightFunction.table([1.0, 2.0, 0.0]))
        est = stein_sanov_empirical(ProductProblem(prob, 40), 0.1, "exact", CFG)
        assert math.isfinite(est.rate_estimate)
        mc = stein_sanov_empirical(ProductProblem(prob, 40), 0.1, "mc", CFG,
                                   mc_samples=120_000, mc_seed=8)
        assert mc.rate_estimate == pytest.approx(est.rate_estimate, abs=1e-2)

    def test_enumeration_caps(self):
        prob = random_interior_finite_problem(np.random.default_rng(0), 3)
        with pytest.raises(EnumerationTooLargeError):
            stein_sanov_empirical(ProductProblem(prob, 300), 0.05, "exact", CFG)
        big = random_interior_finite_problem(np.random.default_rng(0), 7)
        with pytest.raises(EnumerationTooLargeError):
            stein_sanov_empirical(ProductProblem(big, 50), 0.05, "exact", CFG)
