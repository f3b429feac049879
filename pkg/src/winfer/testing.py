"""Context-sensitive hypothesis testing: optimal weighted error-losses, the
finite-n bound chains, and the weighted type-II error exponent.

The central exact identity is

    inf_D [ alpha_phi(D) + beta_phi(D) ] = Delta_phi(p,q) - tau_phi(p,q),

attained by the indicator of {q > p} (ties resolved to D = 0, which is
value-neutral).  n-fold problems use the product weight prod_i phi(x_i).

A caution on the large-KL refinement of the Pinsker bound: the inequality
tau^2 + exp(-K) <= Delta^2 as commonly printed silently assumes unit weight
mass.  The corrected, hypothesis-free form is

    tau^2 + E_phi(p)^2 exp(-K / E_phi(p)) <= Delta^2,

which this module reports alongside the printed form; the printed form is
only asserted under the weight-mass condition making its proof sound
(2 ln W + K (W-1)/W >= 0 with W = E_phi(p)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.special import gammaln, logsumexp

from .core import Distribution, IntegrationConfig, WeightFunction, integrate
from .divergence import (
    HypothesisProblem,
    bhattacharyya_coeff,
    delta,
    hellinger,
    kl,
    weight_mass,
    weighted_tv,
)
from .errors import (
    DomainMismatchError,
    EnumerationTooLargeError,
    IllegalParameterError,
    InfiniteKLError,
)

__all__ = [
    "DecisionRule",
    "ProductProblem",
    "TiltedPair",
    "error_losses",
    "optimal_rule",
    "min_total_error",
    "BoundReport",
    "error_bound_report",
    "NfoldBounds",
    "nfold_error_bounds",
    "product_problem_explicit",
    "stein_sanov_limit",
    "stein_sanov_empirical",
]

_PRODUCT_SPACE_CAP = 10_000_000
_COMPOSITION_CAP = 1_000_000
_EXACT_M_CAP = 6
_EXACT_N_CAP = 200


@dataclass(frozen=True)
class DecisionRule:
    """Randomized decision rule D: outcome -> [0, 1].

    Finite problems use ``values`` (a vector over the alphabet); continuous or
    n-fold problems use ``fn``.
    """

    values: Optional[np.ndarray] = None
    fn: Optional[Callable] = None
    name: str = ""

    def __post_init__(self):
        if self.values is not None:
            v = np.asarray(self.values, dtype=float)
            object.__setattr__(self, "values", v)
            if np.any(v < 0) or np.any(v > 1):
                raise IllegalParameterError("decision rule range must be within [0, 1]")
        elif self.fn is None:
            raise IllegalParameterError("rule needs either values or fn")

    def __call__(self, x):
        if self.values is not None:
            return self.values[np.asarray(x, dtype=int)]
        return np.clip(np.asarray(self.fn(x), dtype=float), 0.0, 1.0)


@dataclass(frozen=True)
class ProductProblem:
    """n i.i.d. observations of a base problem with the factorized weight."""

    base: HypothesisProblem
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise IllegalParameterError("n must be >= 1")


def error_losses(prob: HypothesisProblem, rule: DecisionRule,
                 cfg: IntegrationConfig) -> tuple:
    """Type I and II weighted error-losses (E_phi(p D), E_phi(q (1-D)))."""
    sup = prob.support
    if sup.kind == "finite":
        p, q, w = prob.tables()
        d = rule(np.arange(sup.m))
        return float(np.sum(w * p * d)), float(np.sum(w * q * (1.0 - d)))
    a, _ = integrate(lambda x: prob.wf(x) * prob.p.density(x) * rule(x),
                     sup, cfg, dists=(prob.p, prob.q), wf=prob.wf)
    b, _ = integrate(lambda x: prob.wf(x) * prob.q.density(x) * (1.0 - rule(x)),
                     sup, cfg, dists=(prob.p, prob.q), wf=prob.wf)
    return a, b


def optimal_rule(prob: HypothesisProblem) -> DecisionRule:
    """Indicator of {q > p}; minimizes the combined weighted error-loss."""
    if prob.support.kind == "finite":
        p, q, _ = prob.tables()
        return DecisionRule(values=(q > p).astype(float), name="indicator(q>p)")
    return DecisionRule(
        fn=lambda x: (prob.q.density(x) > prob.p.density(x)).astype(float),
        name="indicator(q>p)")


def min_total_error(prob: HypothesisProblem, cfg: IntegrationConfig) -> float:
    """inf_D [alpha + beta] = Delta_phi - tau_phi."""
    return delta(prob, cfg) - weighted_tv(prob, cfg).value


# ---------------------------------------------------------------------------
# bound chains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    ep: float                      # E_phi(p)
    eq: float                      # E_phi(q)
    delta: float
    rho: float
    tau: float
    eta: float
    kl: float
    lower_affinity: float          # rho^2 / (2 Delta)
    lower_sqrt: float              # Delta - sqrt(Delta^2 - rho^2)
    min_total: float               # Delta - tau
    upper_affinity: float          # rho
    pinsker_bound: float           # sqrt(K E_phi(p) / 2), bound on tau
    pinsker_applicable: bool       # E_phi(p) >= E_phi(q)
    bh_corrected_bound: float      # sqrt(Delta^2 - W^2 e^{-K/W}), bound on tau
    bh_printed_bound: float        # sqrt(Delta^2 - e^{-K}) (nan if negative radicand)
    bh_printed_applicable: bool    # 2 ln W + K (W-1)/W >= 0
    violations: tuple = ()

    @property
    def chain_ok(self) -> bool:
        return not self.violations


def error_bound_report(prob: HypothesisProblem, cfg: IntegrationConfig,
                       atol: float = 1e-9) -> BoundReport:
    """Evaluate every finite-n bound on inf[alpha+beta] / tau and check order."""
    ep = weight_mass(prob.p, prob.wf, cfg)
    eq = weight_mass(prob.q, prob.wf, cfg)
    dl = 0.5 * (ep + eq)
    rho = bhattacharyya_coeff(prob, cfg)
    tau = weighted_tv(prob, cfg).value
    eta = hellinger(prob, cfg)
    kv = kl(prob, cfg).value

    lower_aff = rho ** 2 / (2.0 * dl) if dl > 0 else 0.0
    lower_sqrt = dl - math.sqrt(max(dl * dl - rho * rho, 0.0))
    inf_total = dl - tau

    pinsker = math.sqrt(max(kv, 0.0) * ep / 2.0) if math.isfinite(kv) else math.inf
    pinsker_ok = ep >= eq - atol

    if math.isfinite(kv) and ep > 0:
        rad_corr = dl * dl - ep * ep * math.exp(-kv / ep)
        bh_corr = math.sqrt(max(rad_corr, 0.0))
        rad_printed = dl * dl - math.exp(-kv)
        bh_printed = math.sqrt(rad_printed) if rad_printed >= 0 else math.nan
        printed_ok = 2.0 * math.log(ep) + kv * (ep - 1.0) / ep >= -atol
    else:
        bh_corr = dl
        bh_printed = dl
        printed_ok = math.isfinite(kv)

    tol = atol * max(1.0, dl)
    violations = []
    if not (-tol <= lower_aff):
        violations.append("lower_affinity < 0")
    if lower_aff > lower_sqrt + tol:
        violations.append("rho^2/(2 Delta) > Delta - sqrt(Delta^2 - rho^2)")
    if lower_sqrt > inf_total + tol:
        violations.append("sqrt lower bound exceeds the exact minimum")
    if inf_total > rho + tol:
        violations.append("exact minimum exceeds rho")
    if dl - rho > tau + tol:
        violations.append("Delta - rho > tau")
    if tau > math.sqrt(max(dl * dl - rho * rho, 0.0)) + tol:
        violations.append("tau > sqrt(Delta^2 - rho^2)")
    if pinsker_ok and math.isfinite(kv) and tau > pinsker + tol:
        violations.append("tau > pinsker bound")
    if math.isfinite(kv) and tau > bh_corr + tol:
        violations.append("tau > corrected bretagnolle-huber bound")
    if printed_ok and math.isfinite(kv) and not math.isnan(bh_printed) \
            and tau > bh_printed + tol:
        violations.append("tau > printed bretagnolle-huber bound")

    return BoundReport(
        ep=ep, eq=eq, delta=dl, rho=rho, tau=tau, eta=eta, kl=kv,
        lower_affinity=lower_aff, lower_sqrt=lower_sqrt, min_total=inf_total,
        upper_affinity=rho, pinsker_bound=pinsker, pinsker_applicable=pinsker_ok,
        bh_corrected_bound=bh_corr, bh_printed_bound=bh_printed,
        bh_printed_applicable=printed_ok, violations=tuple(violations))


# ---------------------------------------------------------------------------
# n-fold products
# ---------------------------------------------------------------------------

def product_problem_explicit(pp: ProductProblem) -> HypothesisProblem:
    """Materialize the n-fold product problem over the m^n product alphabet."""
    base = pp.base
    if base.support.kind != "finite":
        raise DomainMismatchError("explicit products need a finite base alphabet")
    m = base.support.m
    if m ** pp.n > _PRODUCT_SPACE_CAP:
        raise EnumerationTooLargeError(
            f"product space {m}^{pp.n} exceeds {_PRODUCT_SPACE_CAP}")
    p, q, w = base.tables()
    pn, qn, wn = p.copy(), q.copy(), w.copy()
    for _ in range(pp.n - 1):
        pn = np.kron(pn, p)
        qn = np.kron(qn, q)
        wn = np.kron(wn, w)
    pn = pn / pn.sum()
    qn = qn / qn.sum()
    return HypothesisProblem(Distribution.from_pmf(pn), Distribution.from_pmf(qn),
                             WeightFunction.table(wn))


@dataclass(frozen=True)
class NfoldBounds:
    n: int
    ep: float
    eq: float
    rho: float
    kl: float
    lower: float                 # rho^{2n} / (E_p^n + E_q^n)
    upper: float                 # rho^n
    upper_sq: float              # (Delta^2 - tau^2)^{n/2}
    upper_eta: Optional[float]   # exp(-n eta^2), only when Delta <= 1
    asymptotic_lower: float      # (1-eps)/(2 Delta) exp(-n E_p^{n-1} K)
    asymptotic_eps: float
    exact_inf: Optional[float]   # Delta_n - tau_n on the explicit product
    exact_error: str = ""


def nfold_error_bounds(pp: ProductProblem, cfg: IntegrationConfig,
                       eps: float = 0.5) -> NfoldBounds:
    """Finite-n sandwich bounds on the minimal combined n-fold error-loss."""
    base = pp.base
    n = pp.n
    ep = weight_mass(base.p, base.wf, cfg)
    eq = weight_mass(base.q, base.wf, cfg)
    dl = 0.5 * (ep + eq)
    rho = bhattacharyya_coeff(base, cfg)
    tau = weighted_tv(base, cfg).value
    eta = hellinger(base, cfg)
    kv = kl(base, cfg).value

    lower = rho ** (2 * n) / (ep ** n + eq ** n)
    upper = rho ** n
    upper_sq = max(dl * dl - tau * tau, 0.0) ** (n / 2.0)
    upper_eta = math.exp(-n * eta * eta) if dl <= 1.0 + 1e-12 else None
    if math.isfinite(kv):
        expo = -n * ep ** (n - 1) * kv
        asym = (1.0 - eps) / (2.0 * dl) * (math.exp(expo) if expo < 700 else math.inf)
    else:
        asym = 0.0

    exact = None
    err = ""
    try:
        full = product_problem_explicit(pp)
        exact = min_total_error(full, cfg)
    except EnumerationTooLargeError:
        err = "product-too-large"

    return NfoldBounds(n=n, ep=ep, eq=eq, rho=rho, kl=kv, lower=lower,
                       upper=upper, upper_sq=upper_sq, upper_eta=upper_eta,
                       asymptotic_lower=asym, asymptotic_eps=eps,
                       exact_inf=exact, exact_error=err)


# ---------------------------------------------------------------------------
# tilted pair and the type-II exponent
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TiltedPair:
    """Normalized weighted densities phi p / E_phi(p), phi q / E_phi(q).

    ``z(x) = ln(p(x)/q(x))`` is the per-observation log-likelihood statistic;
    its tilted means are K(p||q)/E_phi(p) and -K(q||p)/E_phi(q).
    """

    pi: np.ndarray
    vartheta: np.ndarray
    z: np.ndarray
    ep: float
    eq: float
    mean_pi: float         # E_pi[z]
    mean_vartheta: float   # E_vartheta[z]

    @staticmethod
    def from_problem(prob: HypothesisProblem, cfg: IntegrationConfig) -> "TiltedPair":
        if prob.support.kind != "finite":
            raise DomainMismatchError("tilted pair implemented for finite alphabets")
        p, q, w = prob.tables()
        if np.any((p <= 0) | (q <= 0)):
            raise InfiniteKLError("tilting needs strictly interior pmfs")
        ep = float(np.sum(w * p))
        eq = float(np.sum(w * q))
        if ep <= 0 or eq <= 0:
            raise IllegalParameterError("zero weight mass")
        z = np.log(p / q)
        pi = w * p / ep
        vth = w * q / eq
        return TiltedPair(pi=pi, vartheta=vth, z=z, ep=ep, eq=eq,
                          mean_pi=float(np.sum(pi * z)),
                          mean_vartheta=float(np.sum(vth * z)))


def stein_sanov_limit(prob: HypothesisProblem, cfg: IntegrationConfig) -> float:
    """Exponential decay rate ln E_phi(p) - K(p||q)/E_phi(p) of the minimal
    weighted type-II loss at any fixed relative type-I level."""
    kv = kl(prob, cfg).value
    if not math.isfinite(kv):
        raise InfiniteKLError("the rate requires a finite weighted KL divergence")
    ep = weight_mass(prob.p, prob.wf, cfg)
    return math.log(ep) - kv / ep


def _compositions(n: int, m: int):
    """Yield all count vectors k >= 0 with sum k = n (stars and bars)."""
    if m == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in _compositions(n - first, m - 1):
            yield (first,) + rest


def _composition_count(n: int, m: int) -> int:
    return math.comb(n + m - 1, m - 1)


@dataclass(frozen=True)
class SteinSanovEstimate:
    n: int
    eta: float
    rate_estimate: float     # (1/n) ln of the weighted type-II loss
    alpha_attained: float    # weighted type-I level relative to E_phi(p)^n
    limit: float
    method: str


def stein_sanov_empirical(pp: ProductProblem, eta: float, method: str,
                          cfg: IntegrationConfig, mc_samples: int = 200_000,
                          mc_seed: int = 0) -> SteinSanovEstimate:
    """Achieved exponent of the window rule D_n = 1 - 1{ |z_bar - K/E| <= eta }.

    The weighted type-II loss of the rule equals
    E_phi(p)^n E_{pi^n}[ 1_window exp(-sum z_i) ]; the exact branch sums it by
    multinomial enumeration over symbol counts, the Monte Carlo branch samples
    from the tilted pmf.  The attained type-I level is reported relative to
    E_phi(p)^n.
    """
    base = pp.base
    n = pp.n
    if eta <= 0:
        raise IllegalParameterError("eta must be > 0")
    if base.support.kind != "finite":
        raise DomainMismatchError("empirical rate implemented for finite alphabets")
    tp = TiltedPair.from_problem(base, cfg)
    limit = math.log(tp.ep) - kl(base, cfg).value / tp.ep
    target = tp.mean_pi  # = K(p||q)/E_phi(p)
    z = tp.z
    m = base.support.m
    p, q, w = base.tables()

    if method == "exact":
        if m > _EXACT_M_CAP or n > _EXACT_N_CAP:
            raise EnumerationTooLargeError(
                f"exact enumeration capped at m <= {_EXACT_M_CAP}, n <= {_EXACT_N_CAP}")
        if _composition_count(n, m) > _COMPOSITION_CAP:
            raise EnumerationTooLargeError("too many symbol-count compositions")
        counts = np.array(list(_compositions(n, m)), dtype=float)
        zbar = counts @ z / n
        inside = np.abs(zbar - target) <= eta
        log_coef = gammaln(n + 1) - gammaln(counts + 1.0).sum(axis=1)

        def count_loglik(masses):
            # counts on zero-mass symbols kill the term; 0 * (-inf) is masked
            with np.errstate(divide="ignore"):
                lm = np.log(masses)
            dead = ~np.isfinite(lm)
            ll = log_coef + counts @ np.where(dead, 0.0, lm)
            if np.any(dead):
                ll = np.where(counts[:, dead].sum(axis=1) > 0, -np.inf, ll)
            return ll

        ll_q = count_loglik(w * q)
        ll_pi = count_loglik(tp.pi)
        if not np.any(inside):
            raise IllegalParameterError("empty LLN window; increase eta or n")
        log_t2 = float(logsumexp(ll_q[inside]))
        pi_window = float(np.exp(logsumexp(ll_pi[inside])))
        rate = log_t2 / n
        alpha_att = 1.0 - pi_window
        return SteinSanovEstimate(n=n, eta=eta, rate_estimate=rate,
                                  alpha_attained=alpha_att, limit=limit,
                                  method="exact-enumeration")

    if method == "mc":
        rng = np.random.default_rng(np.random.SeedSequence(mc_seed))
        counts = rng.multinomial(n, tp.pi, size=mc_samples).astype(float)
        zsum = counts @ z
        inside = np.abs(zsum / n - target) <= eta
        if not np.any(inside):
            raise IllegalParameterError("no Monte Carlo mass in the LLN window")
        # E_{pi^n}[1_window e^{-sum z}] in log space
        log_mean = float(logsumexp(-zsum[inside])) - math.log(mc_samples)
        rate = math.log(tp.ep) + log_mean / n
        alpha_att = 1.0 - float(np.mean(inside))
        return SteinSanovEstimate(n=n, eta=eta, rate_estimate=rate,
                                  alpha_attained=alpha_att, limit=limit,
                                  method="monte-carlo")

    raise IllegalParameterError(f"unknown method {method!r}")
