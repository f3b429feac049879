"""Weighted distances, divergences, and entropies."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from winfer.core import Distribution, IntegrationConfig, WeightFunction
from winfer.divergence import (
    HypothesisProblem,
    bhattacharyya_coeff,
    bhattacharyya_div,
    chernoff_coeff,
    chernoff_div,
    delta,
    hellinger,
    kl,
    renyi_div,
    renyi_entropy,
    renyi_entropy_ext,
    shannon_entropy,
    tsallis_div,
    weight_mass,
    weighted_tv,
    weighted_tv_sup_oracle,
)
from winfer.errors import AlphabetTooLargeError, IllegalParameterError

CFG = IntegrationConfig()


def binary_problem():
    return HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                             Distribution.from_pmf([0.25, 0.75]),
                             WeightFunction.table([2.0, 1.0]))


def pmf_lists(min_size=2, max_size=8):
    return st.lists(st.floats(0.01, 1.0), min_size=min_size, max_size=max_size)


class TestWeightedTV:
    def test_identity_of_indiscernibles(self):
        p = Distribution.from_pmf([0.4, 0.6])
        prob = HypothesisProblem(p, p, WeightFunction.table([3.0, 0.5]))
        assert weighted_tv(prob, CFG).value == 0.0

    def test_hand_summed_binary(self):
        # (1/2)(2 * 0.25 + 1 * 0.25)
        assert weighted_tv(binary_problem(), CFG).value == pytest.approx(0.375, abs=1e-15)

    def test_sup_oracle_binary(self):
        assert weighted_tv_sup_oracle(binary_problem()) == pytest.approx(0.375, abs=1e-15)

    def test_disjoint_supports_unit_weight(self):
        prob = HypothesisProblem(Distribution.from_pmf([1.0, 0.0]),
                                 Distribution.from_pmf([0.0, 1.0]),
                                 WeightFunction.constant(1.0))
        assert weighted_tv_sup_oracle(prob) == pytest.approx(1.0)
        assert weighted_tv(prob, CFG).value == pytest.approx(1.0)

    def test_oracle_alphabet_cap(self):
        pmf = np.full(21, 1.0 / 21)
        prob = HypothesisProblem(Distribution.from_pmf(pmf),
                                 Distribution.from_pmf(pmf),
                                 WeightFunction.constant(1.0))
        with pytest.raises(AlphabetTooLargeError):
            weighted_tv_sup_oracle(prob)

    def test_gaussian_absolute_weight_quadrature_value(self):
        # pinned by the sup-definition-consistent quadrature oracle; the
        # widely printed (a/2)(1+Erf(a/(2 sqrt 2))) = 1.682689 evaluates the
        # one-sided supremum instead
        prob = HypothesisProblem(Distribution.gaussian(0.0, 1.0),
                                 Distribution.gaussian(2.0, 1.0),
                                 WeightFunction.absolute())
        assert weighted_tv(prob, CFG).value == pytest.approx(1.0731410699216889, rel=1e-9)

    def test_poisson_pair_series_path(self):
        lam1, lam2, g = 1.0, 2.0, 0.3
        prob = HypothesisProblem(Distribution.poisson(lam1),
                                 Distribution.poisson(lam2),
                                 WeightFunction.exponential(g))
        dv = weighted_tv(prob, CFG)
        assert dv.method == "series"
        # independent truncated-sum oracle
        from scipy.stats import poisson as sp_poisson
        ls = np.arange(0, 80)
        direct = 0.5 * float(np.sum(np.exp(g * ls) * np.abs(
            sp_poisson(mu=lam1).pmf(ls) - sp_poisson(mu=lam2).pmf(ls))))
        assert dv.value == pytest.approx(direct, rel=1e-11)

    @given(pmf_lists(), pmf_lists(), pmf_lists())
    @settings(max_examples=60, deadline=None)
    def test_metric_axioms(self, ra, rb, rc):
        m = min(len(ra), len(rb), len(rc))
        pa = np.asarray(ra[:m]) / sum(ra[:m])
        pb = np.asarray(rb[:m]) / sum(rb[:m])
        pc = np.asarray(rc[:m]) / sum(rc[:m])
        w = WeightFunction.table(np.linspace(0.5, 2.0, m))
        def tv(x, y):
            return weighted_tv(HypothesisProblem(
                Distribution.from_pmf(x), Distribution.from_pmf(y), w), CFG).value
        ab, ba = tv(pa, pb), tv(pb, pa)
        assert ab == ba  # symmetry, exact
        assert ab >= 0.0
        assert tv(pa, pc) <= tv(pa, pb) + tv(pb, pc) + 1e-12
        assert tv(pa, pa) == 0.0

    @given(pmf_lists(max_size=10), pmf_lists(max_size=10))
    @settings(max_examples=60, deadline=None)
    def test_matches_sup_oracle(self, ra, rb):
        m = min(len(ra), len(rb))
        pa = np.asarray(ra[:m]) / sum(ra[:m])
        pb = np.asarray(rb[:m]) / sum(rb[:m])
        prob = HypothesisProblem(Distribution.from_pmf(pa),
                                 Distribution.from_pmf(pb),
                                 WeightFunction.table(np.linspace(2.0, 0.5, m)))
        assert abs(weighted_tv(prob, CFG).value
                   - weighted_tv_sup_oracle(prob)) <= 1e-12


class TestDeltaHellingerAffinity:
    def test_delta_unit_weight(self):
        prob = HypothesisProblem(Distribution.from_pmf([0.3, 0.7]),
                                 Distribution.from_pmf([0.6, 0.4]),
                                 WeightFunction.constant(1.0))
        assert delta(prob, CFG) == pytest.approx(1.0, abs=1e-12)

    def test_delta_hand_sum(self):
        assert delta(binary_problem(), CFG) == pytest.approx(1.375, abs=1e-15)

    def test_delta_gaussian_mgf(self):
        g = 0.7
        p = Distribution.gaussian(0.0, 1.0)
        prob = HypothesisProblem(p, p, WeightFunction.exponential(g))
        assert delta(prob, CFG) == pytest.approx(math.exp(g * g / 2), rel=1e-10)

    def test_hellinger_identical(self):
        p = Distribution.from_pmf([0.2, 0.8])
        prob = HypothesisProblem(p, p, WeightFunction.table([1.0, 3.0]))
        assert hellinger(prob, CFG) == 0.0

    def test_hellinger_disjoint(self):
        prob = HypothesisProblem(Distribution.from_pmf([1.0, 0.0]),
                                 Distribution.from_pmf([0.0, 1.0]),
                                 WeightFunction.constant(1.0))
        assert hellinger(prob, CFG) == pytest.approx(1.0)

    def test_hellinger_hand_computation(self):
        expected_sq = 0.5 * (2.0 * (math.sqrt(0.5) - math.sqrt(0.25)) ** 2
                             + 1.0 * (math.sqrt(0.5) - math.sqrt(0.75)) ** 2)
        assert hellinger(binary_problem(), CFG) == pytest.approx(
            math.sqrt(expected_sq), abs=1e-15)

    def test_affinity_of_identical_unit_weight(self):
        p = Distribution.from_pmf([0.3, 0.7])
        prob = HypothesisProblem(p, p, WeightFunction.constant(1.0))
        assert bhattacharyya_coeff(prob, CFG) == pytest.approx(1.0, abs=1e-12)

    def test_affinity_disjoint(self):
        prob = HypothesisProblem(Distribution.from_pmf([1.0, 0.0]),
                                 Distribution.from_pmf([0.0, 1.0]),
                                 WeightFunction.constant(1.0))
        assert bhattacharyya_coeff(prob, CFG) == 0.0

    def test_gaussian_affinity(self):
        a = 1.7
        prob = HypothesisProblem(Distribution.gaussian(0.0, 1.0),
                                 Distribution.gaussian(a, 1.0),
                                 WeightFunction.constant(1.0))
        assert bhattacharyya_coeff(prob, CFG) == pytest.approx(
            math.exp(-a * a / 8), rel=1e-10)

    def test_unit_weight_gaussian_hellinger_closed_form(self):
        a = 1.3
        prob = HypothesisProblem(Distribution.gaussian(0.0, 1.0),
                                 Distribution.gaussian(a, 1.0),
                                 WeightFunction.constant(1.0))
        assert hellinger(prob, CFG) == pytest.approx(
            math.sqrt(1.0 - math.exp(-a * a / 8)), rel=1e-10)

    @given(pmf_lists(), pmf_lists())
    @settings(max_examples=60, deadline=None)
    def test_affinity_mass_identity(self, ra, rb):
        # rho = Delta - eta^2 on every instance
        m = min(len(ra), len(rb))
        prob = HypothesisProblem(
            Distribution.from_pmf(np.asarray(ra[:m]) / sum(ra[:m])),
            Distribution.from_pmf(np.asarray(rb[:m]) / sum(rb[:m])),
            WeightFunction.table(np.linspace(0.3, 1.8, m)))
        rho = bhattacharyya_coeff(prob, CFG)
        dl = delta(prob, CFG)
        eta = hellinger(prob, CFG)
        assert rho == pytest.approx(dl - eta * eta, abs=1e-12)
        assert 0.0 <= rho <= dl + 1e-12


class TestKL:
    def test_identical(self):
        p = Distribution.from_pmf([0.25, 0.75])
        prob = HypothesisProblem(p, p, WeightFunction.table([2.0, 1.0]))
        assert kl(prob, CFG).value == 0.0

    def test_support_violation_is_infinite(self):
        prob = HypothesisProblem(Distribution.from_pmf([0.5, 0.5]),
                                 Distribution.from_pmf([1.0, 0.0]),
                                 WeightFunction.constant(1.0))
        assert kl(prob, CFG).value == math.inf

    def test_exponential_family_laplace_form(self):
        # lam (ln lam - ln lam') phi_hat(lam) - lam (lam' - lam) phi_hat'(lam)
        lam, lam_p, g = 2.0, 3.0, 0.5
        wf = WeightFunction.exponential(g)
        prob = HypothesisProblem(Distribution.exponential(lam),
                                 Distribution.exponential(lam_p), wf)
        expected = lam * (math.log(lam) - math.log(lam_p)) * wf.laplace(lam) \
            - lam * (lam_p - lam) * wf.laplace_prime(lam)
        assert kl(prob, CFG).value == pytest.approx(expected, rel=1e-10)
        assert expected == pytest.approx(0.3482687447446695, rel=1e-12)

    def test_unit_weight_gaussian_closed_form(self):
        mu, mu2, s2, s2b = 0.3, -0.5, 1.2, 0.7
        prob = HypothesisProblem(Distribution.gaussian(mu, s2),
                                 Distribution.gaussian(mu2, s2b),
                                 WeightFunction.constant(1.0))
        expected = 0.5 * (math.log(s2b / s2) + (s2 + (mu - mu2) ** 2) / s2b - 1.0)
        assert kl(prob, CFG).value == pytest.approx(expected, rel=1e-10)

    def test_gibbs_inequality_under_mass_ordering(self):
        # K >= 0 whenever E_phi(p) >= E_phi(q); equality iff phi p = phi q a.e.
        rng = np.random.default_rng(23)
        asserted = 0
        for _ in range(300):
            m = int(rng.integers(2, 7))
            p = rng.dirichlet(np.ones(m))
            q = rng.dirichlet(np.ones(m))
            w = np.exp(rng.uniform(-1.5, 1.5, m))
            prob = HypothesisProblem(Distribution.from_pmf(p),
                                     Distribution.from_pmf(q),
                                     WeightFunction.table(w))
            if weight_mass(prob.p, prob.wf, CFG) >= weight_mass(prob.q, prob.wf, CFG):
                asserted += 1
                assert kl(prob, CFG).value >= -1e-12
        assert asserted > 50
        # exact equality case: the weight kills every coordinate where p != q
        eq = HypothesisProblem(Distribution.from_pmf([0.2, 0.3, 0.5]),
                               Distribution.from_pmf([0.3, 0.3, 0.4]),
                               WeightFunction.table([0.0, 1.0, 0.0]))
        assert kl(eq, CFG).value == 0.0
        near = HypothesisProblem(Distribution.from_pmf([0.2, 0.3, 0.5]),
                                 Distribution.from_pmf([0.3, 0.3, 0.4]),
                                 WeightFunction.table([0.0, 1.0, 0.1]))
        assert kl(near, CFG).value > 0.0


class TestAlphaDivergences:
    def test_chernoff_coeff_identical(self):
        p = Distribution.from_pmf([0.4, 0.6])
        prob = HypothesisProblem(p, p, WeightFunction.table([1.5, 0.5]))
        assert chernoff_coeff(prob, 0.3, CFG) == pytest.approx(1.0, abs=1e-12)

    def test_half_alpha_is_affinity_over_mass(self):
        prob = binary_problem()
        rho = bhattacharyya_coeff(prob, CFG)
        ep = weight_mass(prob.p, prob.wf, CFG)
        assert chernoff_coeff(prob, 0.5, CFG) == pytest.approx(rho / ep, abs=1e-14)

    def test_alpha_range_enforced(self):
        with pytest.raises(IllegalParameterError):
            chernoff_coeff(binary_problem(), 1.2, CFG)

    def test_all_three_vanish_at_identical(self):
        p = Distribution.from_pmf([0.4, 0.6])
        prob = HypothesisProblem(p, p, WeightFunction.table([1.5, 0.5]))
        for fn in (chernoff_div, renyi_div, tsallis_div):
            assert fn(prob, 0.4, CFG).value == pytest.approx(0.0, abs=1e-14)

    def test_chernoff_half_equals_bhattacharyya_div(self):
        prob = binary_problem()
        assert chernoff_div(prob, 0.5, CFG).value == pytest.approx(
            bhattacharyya_div(prob, CFG).value, abs=1e-14)

    def test_renyi_tsallis_converge_to_kl(self):
        prob = binary_problem()
        kv = kl(prob, CFG).value
        assert renyi_div(prob, 0.999, CFG).value == pytest.approx(kv, abs=1e-2)
        assert tsallis_div(prob, 0.999, CFG).value == pytest.approx(kv, abs=1e-2)
        # monotone O(10^-k) envelope over k = 2..6
        prev_r = prev_t = math.inf
        for k in range(2, 7):
            a = 1.0 - 10.0 ** (-k)
            er = abs(renyi_div(prob, a, CFG).value - kv)
            et = abs(tsallis_div(prob, a, CFG).value - kv)
            assert er <= prev_r + 1e-15 and er <= 10.0 ** (-k) * 10.0
            assert et <= prev_t + 1e-15 and et <= 10.0 ** (-k) * 10.0
            prev_r, prev_t = er, et

    def test_alpha_one_delegates_to_kl(self):
        prob = binary_problem()
        assert renyi_div(prob, 1.0, CFG).value == kl(prob, CFG).value
        assert tsallis_div(prob, 1.0, CFG).value == kl(prob, CFG).value

    def test_bhattacharyya_div_cases(self):
        p = Distribution.from_pmf([0.4, 0.6])
        same = HypothesisProblem(p, p, WeightFunction.constant(1.0))
        assert bhattacharyya_div(same, CFG).value == pytest.approx(0.0, abs=1e-14)
        disjoint = HypothesisProblem(Distribution.from_pmf([1.0, 0.0]),
                                     Distribution.from_pmf([0.0, 1.0]),
                                     WeightFunction.constant(1.0))
        assert bhattacharyya_div(disjoint, CFG).value == math.inf


class TestEntropies:
    def test_uniform_shannon(self):
        m = 5
        d = Distribution.from_pmf(np.full(m, 1.0 / m))
        assert shannon_entropy(d, WeightFunction.constant(1.0), CFG) == \
            pytest.approx(math.log(m), abs=1e-12)

    def test_degenerate_shannon_zero(self):
        d = Distribution.from_pmf([1.0, 0.0, 0.0])
        assert shannon_entropy(d, WeightFunction.table([2.0, 5.0, 1.0]), CFG) == 0.0

    def test_gaussian_weighted_shannon_oracle_value(self):
        # (1/2) e^{mu g + g^2 s2/2} (ln(2 pi e s2) + g^2 s2); the exponent of
        # the prefactor is the mgf's g^2 s2 / 2 (quadrature decides)
        mu, s2, g = 0.4, 1.3, 0.5
        d = Distribution.gaussian(mu, s2)
        got = shannon_entropy(d, WeightFunction.exponential(g), CFG)
        e0 = math.exp(mu * g + g * g * s2 / 2)
        assert got == pytest.approx(
            0.5 * e0 * (math.log(2 * math.pi * math.e * s2) + g * g * s2), rel=1e-10)

    def test_uniform_renyi_every_alpha(self):
        m = 6
        d = Distribution.from_pmf(np.full(m, 1.0 / m))
        for a in (0.2, 0.5, 0.8):
            assert renyi_entropy(d, WeightFunction.constant(1.0), a, CFG) == \
                pytest.approx(math.log(m), abs=1e-12)

    def test_extended_reduces_at_beta_one(self):
        d = Distribution.from_pmf([0.2, 0.3, 0.5])
        wf = WeightFunction.table([1.2, 0.8, 1.5])
        for a in (0.3, 0.7):
            assert renyi_entropy_ext(d, wf, a, 1.0, CFG) == \
                renyi_entropy(d, wf, a, CFG)

    def test_extended_domain(self):
        d = Distribution.from_pmf([0.2, 0.8])
        wf = WeightFunction.constant(1.0)
        with pytest.raises(IllegalParameterError):
            renyi_entropy_ext(d, wf, 0.3, 0.5, CFG)  # alpha + beta <= 1

    def test_gaussian_weighted_renyi_closed_form(self):
        # (1/2) E0 [ln(2 pi s2) - ln(a)/(1-a) + g^2 s2 / a] with the corrected
        # E0 = e^{mu g + g^2 s2/2}
        mu, s2, g, a = 0.2, 1.1, 0.4, 0.5
        d = Distribution.gaussian(mu, s2)
        got = renyi_entropy(d, WeightFunction.exponential(g), a, CFG)
        e0 = math.exp(mu * g + g * g * s2 / 2)
        want = 0.5 * e0 * (math.log(2 * math.pi * s2)
                           - math.log(a) / (1 - a) + g * g * s2 / a)
        assert got == pytest.approx(want, rel=1e-9)

    def test_unit_weight_reduction_gaussian(self):
        s2 = 1.7
        d = Distribution.gaussian(-0.3, s2)
        assert shannon_entropy(d, WeightFunction.constant(1.0), CFG) == \
            pytest.approx(0.5 * math.log(2 * math.pi * math.e * s2), rel=1e-10)
