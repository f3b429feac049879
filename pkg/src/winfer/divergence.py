"""Weighted distances, divergences, and entropies between a pair of densities.

All quantities act on a ``HypothesisProblem`` (p, q, phi) sharing one support.
Finite alphabets use exact summation; countable supports use adaptive series;
continuous supports use adaptive quadrature with envelope-derived truncation.

Conventions
-----------
* 0*ln(0) := 0 and the indicator 1(p>0) guard the Kullback-Leibler integrand.
* +inf is a first-class divergence value (``math.inf``), produced by the
  support-violation test on discrete spaces or by a diverging quadrature.
* The Renyi/Tsallis alpha-divergences are normalized so that both converge to
  the weighted KL divergence as alpha -> 1 (this fixes a sign slip in one
  common way of writing the 1/(1-alpha) prefactor); alpha = 1 simply returns
  the KL value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    Distribution,
    IntegrationConfig,
    Support,
    WeightFunction,
    gauss_hermite_nodes,
    integrate,
)
from .errors import (
    AlphabetTooLargeError,
    DomainMismatchError,
    IllegalParameterError,
    ZeroWeightMassError,
)

__all__ = [
    "HypothesisProblem",
    "DivergenceValue",
    "weight_mass",
    "weighted_tv",
    "weighted_tv_sup_oracle",
    "delta",
    "hellinger",
    "bhattacharyya_coeff",
    "kl",
    "chernoff_coeff",
    "chernoff_div",
    "renyi_div",
    "tsallis_div",
    "bhattacharyya_div",
    "shannon_entropy",
    "renyi_entropy",
    "renyi_entropy_ext",
]

_ORACLE_MAX_M = 20


@dataclass(frozen=True)
class HypothesisProblem:
    """Simple hypothesis p versus simple alternative q under weight phi."""

    p: Distribution
    q: Distribution
    wf: WeightFunction

    def __post_init__(self):
        if not self.p.support.same_space(self.q.support):
            raise DomainMismatchError("p and q must share one outcome space")

    @property
    def support(self) -> Support:
        return self.p.support

    def swapped(self) -> "HypothesisProblem":
        return HypothesisProblem(p=self.q, q=self.p, wf=self.wf)

    # exact vectors for the finite-alphabet fast paths
    def tables(self):
        sup = self.support
        return (self.p.finite.pmf, self.q.finite.pmf, self.wf.table_on(sup))


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    error: float = 0.0
    method: str = "exact-sum"

    def __post_init__(self):
        if self.error < 0:
            raise IllegalParameterError("error estimate must be >= 0")

    @property
    def is_finite(self) -> bool:
        return math.isfinite(self.value)


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------

def _method_for(support: Support) -> str:
    if support.kind == "finite":
        return "exact-sum"
    if support.kind == "counting":
        return "series"
    return "quadrature"


def _weight_eval(wf: WeightFunction, support: Support):
    """Pointwise weight evaluator appropriate for the support."""
    if support.kind == "real-vector":
        return wf.vector_values
    return wf


def _integral(prob: HypothesisProblem, f, cfg: IntegrationConfig, points=()):
    """integral of f(x) over the shared support with both envelopes in play."""
    return integrate(f, prob.support, cfg, dists=(prob.p, prob.q), wf=prob.wf,
                     points=points)


def _mv_reference(prob: HypothesisProblem):
    """Covering Gaussian (mean, cov) for vector-support quadrature."""
    ms, cs = [], []
    for d in (prob.p, prob.q):
        ms.append(np.asarray(d.center, dtype=float))
        cs.append(np.asarray(d.scale, dtype=float))
    cov = cs[0] + cs[1]
    mean = 0.5 * (ms[0] + ms[1])
    g = prob.wf.exp_rate_vector
    if g is not None:
        mean = mean + cov @ g  # follow the exponential tilt of the mass
    return mean, cov


def _mv_integral(prob: HypothesisProblem, f, level: int = 60) -> float:
    """integral f dx = E_ref[f/ref] under a covering Gaussian reference."""
    mean, cov = _mv_reference(prob)
    ref = Distribution.gaussian_mv(mean, cov)
    nodes, wts = gauss_hermite_nodes(mean, cov, level)
    vals = np.asarray(f(nodes), dtype=float) / ref.density(nodes)
    return float(np.sum(wts * vals))


def _mv_integral_with_error(prob: HypothesisProblem, f, level: int = 60) -> tuple:
    """Two-level tensor rule: value at `level`, error from the level gap."""
    hi = _mv_integral(prob, f, level)
    lo = _mv_integral(prob, f, level - 12)
    return hi, abs(hi - lo)


def _crossing_points(prob: HypothesisProblem, cfg: IntegrationConfig, n_grid: int = 1024):
    """Sign changes of p - q bracketed on a grid, then polished by root solves.

    Inexact kink hints degrade the adaptive error estimate, so each bracket is
    refined to machine precision before being handed to the quadrature.
    """
    from scipy.optimize import brentq

    from .core import _window_for
    lo, hi = _window_for(prob.support, cfg, (prob.p, prob.q), prob.wf)
    xs = np.linspace(lo, hi, n_grid)
    diff = prob.p.density(xs) - prob.q.density(xs)
    sign = np.sign(diff)
    idx = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    g = lambda x: float(prob.p.density(x) - prob.q.density(x))
    out = []
    for i in idx:
        try:
            out.append(brentq(g, xs[i], xs[i + 1], xtol=1e-14, rtol=1e-15))
        except ValueError:
            out.append(0.5 * (xs[i] + xs[i + 1]))
    return out


def weight_mass(dist: Distribution, wf: WeightFunction, cfg: IntegrationConfig) -> float:
    """E_phi(p), the mean weight under the density."""
    sup = dist.support
    if sup.kind == "finite":
        return float(np.sum(wf.table_on(sup) * dist.finite.pmf))
    if sup.kind == "real-vector":
        prob = HypothesisProblem(dist, dist, wf)
        wv = _weight_eval(wf, sup)
        return _mv_integral(prob, lambda x: wv(x) * dist.density(x))
    val, _ = integrate(lambda x: wf(x) * dist.density(x), sup, cfg,
                       dists=(dist,), wf=wf)
    return val


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def weighted_tv(prob: HypothesisProblem, cfg: IntegrationConfig) -> DivergenceValue:
    """Weighted total variation (1/2) E_phi(|p - q|)."""
    sup = prob.support
    if sup.kind == "finite":
        p, q, w = prob.tables()
        return DivergenceValue(0.5 * float(np.sum(w * np.abs(p - q))), 0.0, "exact-sum")
    wv = _weight_eval(prob.wf, sup)
    f = lambda x: wv(x) * np.abs(prob.p.density(x) - prob.q.density(x))
    if sup.kind == "real-vector":
        val, err = _mv_integral_with_error(prob, f)
        return DivergenceValue(0.5 * val, 0.5 * err, "quadrature")
    if sup.kind == "counting":
        val, err = _integral(prob, f, cfg)
        return DivergenceValue(0.5 * val, 0.5 * err, "series")
    pts = _crossing_points(prob, cfg)
    val, err = _integral(prob, f, cfg, points=pts)
    return DivergenceValue(0.5 * val, 0.5 * err, "quadrature")


def weighted_tv_sup_oracle(prob: HypothesisProblem) -> float:
    """Brute-force sup-over-subsets definition, finite alphabets only.

    Evaluates (1/2)(sup_A [int_A phi dP - int_A phi dQ]
                    + sup_A [int_A phi dQ - int_A phi dP])
    by enumerating all 2^m subsets.
    """
    if prob.support.kind != "finite":
        raise AlphabetTooLargeError("sup oracle requires a finite alphabet")
    m = prob.support.m
    if m > _ORACLE_MAX_M:
        raise AlphabetTooLargeError(f"sup oracle capped at m <= {_ORACLE_MAX_M}")
    p, q, w = prob.tables()
    v = w * (p - q)
    masks = np.arange(2 ** m, dtype=np.uint32)
    bits = (masks[:, None] >> np.arange(m)) & 1
    sums = bits @ v
    return 0.5 * (float(np.max(sums)) + float(np.max(-sums)))


def delta(prob: HypothesisProblem, cfg: IntegrationConfig) -> float:
    """Delta_phi(p, q) = (E_phi(p) + E_phi(q)) / 2; equals 1 when phi == 1."""
    return 0.5 * (weight_mass(prob.p, prob.wf, cfg) + weight_mass(prob.q, prob.wf, cfg))


def hellinger(prob: HypothesisProblem, cfg: IntegrationConfig) -> float:
    """Weighted Hellinger distance ((1/2) E_phi((sqrt p - sqrt q)^2))^{1/2}."""
    sup = prob.support
    if sup.kind == "finite":
        p, q, w = prob.tables()
        sq = float(np.sum(w * (np.sqrt(p) - np.sqrt(q)) ** 2))
        return math.sqrt(max(0.5 * sq, 0.0))
    wv = _weight_eval(prob.wf, sup)
    f = lambda x: wv(x) * (np.sqrt(prob.p.density(x)) - np.sqrt(prob.q.density(x))) ** 2
    if sup.kind == "real-vector":
        return math.sqrt(max(0.5 * _mv_integral(prob, f), 0.0))
    val, _ = _integral(prob, f, cfg)
    return math.sqrt(max(0.5 * val, 0.0))


def bhattacharyya_coeff(prob: HypothesisProblem, cfg: IntegrationConfig) -> float:
    """Weighted affinity rho = E_phi(sqrt(p q)); satisfies rho = Delta - eta^2."""
    sup = prob.support
    if sup.kind == "finite":
        p, q, w = prob.tables()
        return float(np.sum(w * np.sqrt(p * q)))
    wv = _weight_eval(prob.wf, sup)
    f = lambda x: wv(x) * np.sqrt(prob.p.density(x) * prob.q.density(x))
    if sup.kind == "real-vector":
        return _mv_integral(prob, f)
    val, _ = _integral(prob, f, cfg)
    return val


# ---------------------------------------------------------------------------
# divergences
# ---------------------------------------------------------------------------

def _kl_terms(p, q, w):
    """Summands of the discrete weighted KL with the 0 ln 0 convention."""
    active = (p > 0) & (w > 0)
    if np.any(active & (q <= 0)):
        return None  # phi p positive on a q-null set
    out = np.zeros_like(p)
    out[active] = w[active] * p[active] * np.log(p[active] / q[active])
    return out


def kl(prob: HypothesisProblem, cfg: IntegrationConfig) -> DivergenceValue:
    """Weighted Kullback-Leibler divergence E(phi p 1(p>0) ln(p/q))."""
    sup = prob.support
    if sup.kind == "finite":
        p, q, w = prob.tables()
        terms = _kl_terms(p, q, w)
        if terms is None:
            return DivergenceValue(math.inf, 0.0, "exact-sum")
        return DivergenceValue(float(np.sum(terms)), 0.0, "exact-sum")

    wv = _weight_eval(prob.wf, prob.support)

    def f(x):
        p = prob.p.density(x)
        q = prob.q.density(x)
        w = wv(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where((p > 0) & (w > 0), np.log(np.where(p > 0, p, 1.0))
                         - np.log(np.where(q > 0, q, np.finfo(float).tiny)), 0.0)
        return np.where((p > 0) & (w > 0), w * p * r, 0.0)

    if sup.kind == "counting":
        val, err = _integral(prob, f, cfg)
        return DivergenceValue(val, err, "series")
    if sup.kind == "real-vector":
        val, err = _mv_integral_with_error(prob, f)
        return DivergenceValue(val, err, "quadrature")
    val, err = _integral(prob, f, cfg)
    return DivergenceValue(val, err, "quadrature")


def chernoff_coeff(prob: HypothesisProblem, alpha: float, cfg: IntegrationConfig) -> float:
    """Weighted Chernoff coefficient E_phi(p^a q^(1-a)) / E_phi(p), 0 < a < 1."""
    if not 0 < alpha < 1:
        raise IllegalParameterError("alpha must lie in (0, 1)")
    ep = weight_mass(prob.p, prob.wf, cfg)
    if ep <= 0:
        raise ZeroWeightMassError("E_phi(p) = 0")
    sup = prob.support
    if sup.kind == "finite":
        p, q, w = prob.tables()
        num = float(np.sum(w * p ** alpha * q ** (1 - alpha)))
        return num / ep
    wv = _weight_eval(prob.wf, sup)
    f = lambda x: wv(x) * prob.p.density(x) ** alpha * prob.q.density(x) ** (1 - alpha)
    if sup.kind == "real-vector":
        return _mv_integral(prob, f) / ep
    val, _ = _integral(prob, f, cfg)
    return val / ep


def chernoff_div(prob: HypothesisProblem, alpha: float, cfg: IntegrationConfig) -> DivergenceValue:
    """-ln of the weighted Chernoff coefficient."""
    coeff = chernoff_coeff(prob, alpha, cfg)
    if coeff <= 0:
        return DivergenceValue(math.inf, 0.0, _method_for(prob.support))
    return DivergenceValue(-math.log(coeff), 0.0, _method_for(prob.support))


def renyi_div(prob: HypothesisProblem, alpha: float, cfg: IntegrationConfig) -> DivergenceValue:
    """Weighted Renyi alpha-divergence; converges to kl as alpha -> 1."""
    if alpha == 1.0:
        return kl(prob, cfg)
    if not 0 < alpha < 1:
        raise IllegalParameterError("alpha must lie in (0, 1]")
    coeff = chernoff_coeff(prob, alpha, cfg)
    ep = weight_mass(prob.p, prob.wf, cfg)
    if coeff <= 0:
        return DivergenceValue(math.inf, 0.0, _method_for(prob.support))
    return DivergenceValue(ep / (alpha - 1.0) * math.log(coeff), 0.0,
                           _method_for(prob.support))


def tsallis_div(prob: HypothesisProblem, alpha: float, cfg: IntegrationConfig) -> DivergenceValue:
    """Weighted Tsallis alpha-divergence; converges to kl as alpha -> 1."""
    if alpha == 1.0:
        return kl(prob, cfg)
    if not 0 < alpha < 1:
        raise IllegalParameterError("alpha must lie in (0, 1]")
    coeff = chernoff_coeff(prob, alpha, cfg)
    ep = weight_mass(prob.p, prob.wf, cfg)
    return DivergenceValue(ep / (alpha - 1.0) * (coeff - 1.0), 0.0,
                           _method_for(prob.support))


def bhattacharyya_div(prob: HypothesisProblem, cfg: IntegrationConfig) -> DivergenceValue:
    """-ln rho + ln E_phi(p); the Chernoff divergence at alpha = 1/2."""
    rho = bhattacharyya_coeff(prob, cfg)
    ep = weight_mass(prob.p, prob.wf, cfg)
    if ep <= 0:
        raise ZeroWeightMassError("E_phi(p) = 0")
    if rho <= 0:
        return DivergenceValue(math.inf, 0.0, _method_for(prob.support))
    return DivergenceValue(-math.log(rho) + math.log(ep), 0.0, _method_for(prob.support))


# ---------------------------------------------------------------------------
# entropies
# ---------------------------------------------------------------------------

def shannon_entropy(p: Distribution, wf: WeightFunction, cfg: IntegrationConfig) -> float:
    """Weighted Shannon entropy -E_phi(p ln p) (0 ln 0 := 0)."""
    sup = p.support
    if sup.kind == "finite":
        pm = p.finite.pmf
        w = wf.table_on(sup)
        active = pm > 0
        return float(-np.sum(w[active] * pm[active] * np.log(pm[active])))

    wv = _weight_eval(wf, sup)

    def f(x):
        d = p.density(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(d > 0, d * np.log(np.where(d > 0, d, 1.0)), 0.0)
        return -wv(x) * term

    if sup.kind == "real-vector":
        prob = HypothesisProblem(p, p, wf)
        return _mv_integral(prob, f)
    val, _ = integrate(f, sup, cfg, dists=(p,), wf=wf)
    return val


def renyi_entropy(p: Distribution, wf: WeightFunction, alpha: float,
                  cfg: IntegrationConfig) -> float:
    """Weighted Renyi alpha-entropy E_phi(p)/(1-a) ln(E_phi(p^a)/E_phi(p))."""
    if not 0 < alpha < 1:
        raise IllegalParameterError("alpha must lie in (0, 1)")
    return renyi_entropy_ext(p, wf, alpha, 1.0, cfg)


def renyi_entropy_ext(p: Distribution, wf: WeightFunction, alpha: float, beta: float,
                      cfg: IntegrationConfig) -> float:
    """Extended weighted Renyi entropy with exponents (alpha+beta-1, beta).

    Requires alpha > 0, alpha != 1, beta > 0, alpha + beta > 1; beta = 1
    recovers the plain weighted Renyi alpha-entropy.
    """
    if alpha <= 0 or alpha == 1.0 or beta <= 0 or alpha + beta <= 1:
        raise IllegalParameterError("need alpha>0, alpha!=1, beta>0, alpha+beta>1")
    sup = p.support

    def mass(expo: float) -> float:
        if sup.kind == "finite":
            pm = p.finite.pmf
            w = wf.table_on(sup)
            return float(np.sum(w * pm ** expo))
        wv = _weight_eval(wf, sup)
        f = lambda x: wv(x) * p.density(x) ** expo
        if sup.kind == "real-vector":
            return _mv_integral(HypothesisProblem(p, p, wf), f)
        val, _ = integrate(f, sup, cfg, dists=(p,), wf=wf)
        return val

    ep = mass(1.0)
    num = mass(alpha + beta - 1.0)
    den = mass(beta)
    if num <= 0 or den <= 0:
        raise ZeroWeightMassError("degenerate weighted masses in Renyi entropy")
    return ep / (1.0 - alpha) * math.log(num / den)
