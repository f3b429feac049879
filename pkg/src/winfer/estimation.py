"""Weighted Fisher information, weighted Cramer-Rao bounds (versions A and B),
and weighted van Trees bounds (versions A, B, C).

Smooth parametric models expose the density and its theta-gradient; n i.i.d.
observations carry the product weight prod_i phi(x_i).  Monte Carlo estimates
of the weighted quadratic deviation report their standard error, and every
bound assertion in the test-suites is made at 3 standard errors.

Regularity is not assumed silently: ``check_regularity`` verifies the two
interchange identities (grad E = int phi grad p and int grad p = 0) and the
bound computations call it first, aborting with a diagnostic rather than
reporting an unsound bound.

Version-A bounds follow the single-entry derivation, which carries a
Kronecker delta between the parameter component and the differentiation
direction (for d = 1 the distinction is invisible).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    Distribution,
    IntegrationConfig,
    Support,
    WeightFunction,
    finite_difference_gradient,
    integrate,
)
from .divergence import HypothesisProblem, kl, weight_mass
from .errors import (
    IllegalParameterError,
    ParameterOutOfDomainError,
    RegularityError,
)

__all__ = [
    "ParametricModel",
    "EstimatorSpec",
    "PriorSpec",
    "gaussian_shift_model",
    "gaussian_scale_model",
    "poisson_log_mean_model",
    "mean_estimator",
    "shifted_mean_estimator",
    "scale_abs_mean_estimator",
    "weighted_fisher",
    "FisherAux",
    "weighted_fisher_aux",
    "nfold_weighted_fisher",
    "check_regularity",
    "KlExpansionReport",
    "kl_expansion_check",
    "CramerRaoResult",
    "cramer_rao_A",
    "cramer_rao_B",
    "VanTreesResult",
    "van_trees",
]

_MC_CHUNK = 250_000


@dataclass(frozen=True)
class ParametricModel:
    """Family theta -> p_theta with analytic gradient access.

    ``density(x, theta)`` and ``grad_density(x, theta)`` are vectorized in x;
    the gradient returns shape (N,) for d = 1.  ``make_distribution`` attaches
    the envelope metadata the quadrature engine needs.
    """

    name: str
    d: int
    support: Support
    density: Callable
    grad_density: Callable
    make_distribution: Callable
    sampler: Callable                      # (rng, theta, size) -> draws
    theta_domain: Callable = lambda th: True

    def check(self, theta) -> float:
        if not self.theta_domain(theta):
            raise ParameterOutOfDomainError(f"{self.name}: theta outside the domain")
        return theta


def gaussian_shift_model(sigma: float = 1.0) -> ParametricModel:
    """N(theta, sigma^2) with known variance; the classical shift family."""
    if sigma <= 0:
        raise IllegalParameterError("sigma must be > 0")
    s2 = sigma * sigma

    def density(x, th):
        x = np.asarray(x, dtype=float)
        return np.exp(-((x - th) ** 2) / (2 * s2)) / math.sqrt(2 * math.pi * s2)

    def grad_density(x, th):
        x = np.asarray(x, dtype=float)
        return density(x, th) * (x - th) / s2

    return ParametricModel(
        name="gaussian-shift", d=1, support=Support.real_line(),
        density=density, grad_density=grad_density,
        make_distribution=lambda th: Distribution.gaussian(th, s2),
        sampler=lambda rng, th, size: rng.normal(th, sigma, size=size))


def gaussian_scale_model() -> ParametricModel:
    """p_theta(x) = (1/theta) g(x/theta) with standard normal g (theta > 0)."""

    def density(x, th):
        x = np.asarray(x, dtype=float)
        return np.exp(-x * x / (2 * th * th)) / (math.sqrt(2 * math.pi) * th)

    def grad_density(x, th):
        x = np.asarray(x, dtype=float)
        return density(x, th) * (x * x / th ** 3 - 1.0 / th)

    return ParametricModel(
        name="gaussian-scale", d=1, support=Support.real_line(),
        density=density, grad_density=grad_density,
        make_distribution=lambda th: Distribution.gaussian(0.0, th * th),
        sampler=lambda rng, th, size: rng.normal(0.0, th, size=size),
        theta_domain=lambda th: th > 0)


def poisson_log_mean_model() -> ParametricModel:
    """Poisson(e^theta); d ln p / d theta = l - e^theta."""

    def density(x, th):
        lam = math.exp(th)
        from scipy.stats import poisson as _poisson
        return _poisson(mu=lam).pmf(np.asarray(x))

    def grad_density(x, th):
        lam = math.exp(th)
        x = np.asarray(x, dtype=float)
        return density(x, th) * (x - lam)

    return ParametricModel(
        name="poisson-log-mean", d=1, support=Support.counting(),
        density=density, grad_density=grad_density,
        make_distribution=lambda th: Distribution.poisson(math.exp(th)),
        sampler=lambda rng, th, size: rng.poisson(math.exp(th), size=size))


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EstimatorSpec:
    """Estimator over n-tuples with optional analytic weighted-bias data.

    ``bias``/``bias_prime`` refer to the plain-weight decomposition
    W = E(theta)^n theta + b(theta); ``c``/``c_prime`` to the square-root
    weight decomposition Z = s(theta)^n theta + c(theta).  Each callable takes
    (theta, n).  When absent, the bounds fall back to Monte Carlo estimation
    of the bias derivative with propagated uncertainty.
    """

    name: str
    fn: Callable                            # (T, n) samples -> (T,) estimates
    bias: Optional[Callable] = None
    bias_prime: Optional[Callable] = None
    c: Optional[Callable] = None
    c_prime: Optional[Callable] = None


def mean_estimator(model: ParametricModel, wf: WeightFunction) -> EstimatorSpec:
    """Sample mean; analytic weighted bias under the Gaussian shift family
    with an exponential weight (the equality case of version A)."""
    if model.name == "gaussian-shift" and wf.kind == "exponential" \
            and np.ndim(wf.gamma) == 0:
        g = float(wf.gamma)
        # sigma^2 backed out of the model's distribution at theta = 0
        s2 = model.make_distribution(0.0).params["sigma2"]

        def _mass(th, n):
            return math.exp(n * (th * g + s2 * g * g / 2.0))

        def _smass(th, n):
            return math.exp(n * (th * g / 2.0 + s2 * g * g / 8.0))

        return EstimatorSpec(
            name="mean", fn=lambda xs: xs.mean(axis=1),
            bias=lambda th, n: g * s2 * _mass(th, n),
            bias_prime=lambda th, n: n * g * g * s2 * _mass(th, n),
            c=lambda th, n: 0.5 * s2 * g * _smass(th, n),
            c_prime=lambda th, n: 0.25 * n * s2 * g * g * _smass(th, n))
    return EstimatorSpec(name="mean", fn=lambda xs: xs.mean(axis=1))


def shifted_mean_estimator(model: ParametricModel, wf: WeightFunction) -> EstimatorSpec:
    """Sample mean minus sigma^2 gamma: zero weighted bias under the Gaussian
    shift family with the exponential weight."""
    if model.name != "gaussian-shift" or wf.kind != "exponential" \
            or np.ndim(wf.gamma) != 0:
        raise IllegalParameterError(
            "shifted mean is specific to the Gaussian shift family with e^{gamma x}")
    g = float(wf.gamma)
    s2 = model.make_distribution(0.0).params["sigma2"]

    def _smass(th, n):
        return math.exp(n * (th * g / 2.0 + s2 * g * g / 8.0))

    return EstimatorSpec(
        name="shifted-mean", fn=lambda xs: xs.mean(axis=1) - s2 * g,
        bias=lambda th, n: 0.0,
        bias_prime=lambda th, n: 0.0,
        c=lambda th, n: -0.5 * s2 * g * _smass(th, n),
        c_prime=lambda th, n: -0.25 * n * s2 * g * g * _smass(th, n))


def scale_abs_mean_estimator() -> EstimatorSpec:
    """sqrt(pi/2) mean |X_i|: unbiased for the Gaussian scale parameter when
    phi == 1; weighted bias handled by Monte Carlo differencing."""
    return EstimatorSpec(
        name="scale-abs-mean",
        fn=lambda xs: math.sqrt(math.pi / 2.0) * np.abs(xs).mean(axis=1))


# ---------------------------------------------------------------------------
# weighted Fisher information
# ---------------------------------------------------------------------------

def _fisher_entry(model, wf, theta, l, m_, cfg) -> float:
    dist = model.make_distribution(theta)

    def f(x):
        p = model.density(x, theta)
        if model.d == 1:
            gl = gm = model.grad_density(x, theta)
        else:
            grads = model.grad_density(x, theta)
            gl, gm = grads[..., l], grads[..., m_]
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.where(p > 0, gl * gm / np.where(p > 0, p, 1.0), 0.0)
        return wf(x) * val

    val, _ = integrate(f, model.support, cfg, dists=(dist,), wf=wf)
    return val


def weighted_fisher(model: ParametricModel, wf: WeightFunction, theta,
                    cfg: IntegrationConfig):
    """int phi 1(p>0) p^{-1} grad p^T grad p; scalar when d = 1."""
    model.check(theta)
    if model.d == 1:
        return _fisher_entry(model, wf, theta, 0, 0, cfg)
    mat = np.empty((model.d, model.d))
    for l in range(model.d):
        for m_ in range(l, model.d):
            mat[l, m_] = mat[m_, l] = _fisher_entry(model, wf, theta, l, m_, cfg)
    return mat


@dataclass(frozen=True)
class FisherAux:
    E: float                 # mean weight E(theta) = int phi p_theta
    grad_E: np.ndarray       # finite-difference gradient of E
    V: np.ndarray            # int phi grad p_theta
    interchange_gap: float   # max |grad_E - V|

    @property
    def scalar_grad_E(self) -> float:
        return float(self.grad_E[0])

    @property
    def scalar_V(self) -> float:
        return float(self.V[0])


def _mean_weight(model, wf, theta, cfg) -> float:
    dist = model.make_distribution(theta)
    return weight_mass(dist, wf, cfg)


def weighted_fisher_aux(model: ParametricModel, wf: WeightFunction, theta,
                        cfg: IntegrationConfig) -> FisherAux:
    """E(theta), its gradient, and V = int phi grad p (regularity: V = grad E)."""
    model.check(theta)
    dist = model.make_distribution(theta)
    e = _mean_weight(model, wf, theta, cfg)
    grad_e = finite_difference_gradient(
        lambda th: _mean_weight(model, wf, th, cfg), theta, h=1e-5)
    v = np.empty(model.d)
    for l in range(model.d):
        def f(x, _l=l):
            g = model.grad_density(x, theta)
            g = g if model.d == 1 else g[..., _l]
            return wf(x) * g
        v[l], _ = integrate(f, model.support, cfg, dists=(dist,), wf=wf)
    gap = float(np.max(np.abs(grad_e - v)))
    return FisherAux(E=e, grad_E=grad_e, V=v, interchange_gap=gap)


def nfold_weighted_fisher(model: ParametricModel, wf: WeightFunction, theta,
                          n: int, cfg: IntegrationConfig):
    """n E^{n-1} I_phi + n (n-1) E^{n-2} V^T V for n i.i.d. observations."""
    if n < 1:
        raise IllegalParameterError("n must be >= 1")
    aux = weighted_fisher_aux(model, wf, theta, cfg)
    info = weighted_fisher(model, wf, theta, cfg)
    if model.d == 1:
        v = aux.scalar_V
        return n * aux.E ** (n - 1) * info + n * (n - 1) * aux.E ** (n - 2) * v * v
    vv = np.outer(aux.V, aux.V)
    return n * aux.E ** (n - 1) * info + n * (n - 1) * aux.E ** (n - 2) * vv


def check_regularity(model: ParametricModel, wf: WeightFunction, theta,
                     cfg: IntegrationConfig, tol: float = 1e-6) -> None:
    """Abort (RegularityError) unless the interchange identities hold."""
    aux = weighted_fisher_aux(model, wf, theta, cfg)
    scale = max(1.0, abs(aux.E))
    if aux.interchange_gap > tol * scale:
        raise RegularityError(
            f"grad E vs int phi grad p gap {aux.interchange_gap:.2e} exceeds {tol:.0e}")
    dist = model.make_distribution(theta)
    for l in range(model.d):
        def f(x, _l=l):
            g = model.grad_density(x, theta)
            return g if model.d == 1 else g[..., _l]
        total, _ = integrate(f, model.support, cfg, dists=(dist,), wf=None)
        if abs(total) > tol:
            raise RegularityError(f"int grad p = {total:.2e} != 0")


# ---------------------------------------------------------------------------
# local KL expansion
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KlExpansionReport:
    steps: np.ndarray
    first_quotients: np.ndarray    # K(p_theta || p_{theta+h}) / h
    second_quotients: np.ndarray   # [K + E(theta+h) - E(theta)] / h^2
    first_limit: float             # -E'(theta)
    second_limit: float            # I_phi(theta) / 2
    first_order: float             # observed convergence order in h
    second_order: float


def _weighted_kl_between(model, wf, theta, theta_p, cfg) -> float:
    prob = HypothesisProblem(model.make_distribution(theta),
                             model.make_distribution(theta_p), wf)
    return kl(prob, cfg).value


def _observed_order(hs: np.ndarray, errs: np.ndarray) -> float:
    good = errs > 1e-14
    if good.sum() < 2:
        return float("inf")
    slope, _ = np.polyfit(np.log(hs[good]), np.log(errs[good]), 1)
    return float(slope)


def kl_expansion_check(model: ParametricModel, wf: WeightFunction, theta: float,
                       steps, cfg: IntegrationConfig, component: int = 0,
                       ) -> KlExpansionReport:
    """Difference-quotient convergence of the weighted KL local expansion.

    With h = theta' - theta the quotients K/h and [K + E(theta') - E(theta)]/h^2
    converge to -E'(theta) and I_phi(theta)/2 respectively, at first order in h.
    (The difference direction is fixed so that both limits exist; flipping the
    sign of the first quotient makes the second diverge like 1/h.)
    """
    if model.d != 1:
        raise IllegalParameterError("expansion check implemented for scalar theta")
    hs = np.asarray(sorted(steps, reverse=True), dtype=float)
    aux = weighted_fisher_aux(model, wf, theta, cfg)
    info = weighted_fisher(model, wf, theta, cfg)
    e0 = aux.E
    q1 = np.empty_like(hs)
    q2 = np.empty_like(hs)
    for i, h in enumerate(hs):
        kv = _weighted_kl_between(model, wf, theta, theta + h, cfg)
        e1 = _mean_weight(model, wf, theta + h, cfg)
        q1[i] = kv / h
        q2[i] = (kv + (e1 - e0)) / (h * h)
    first_limit = -aux.scalar_grad_E
    second_limit = 0.5 * info
    return KlExpansionReport(
        steps=hs, first_quotients=q1, second_quotients=q2,
        first_limit=first_limit, second_limit=second_limit,
        first_order=_observed_order(hs, np.abs(q1 - first_limit)),
        second_order=_observed_order(hs, np.abs(q2 - second_limit)))


# ---------------------------------------------------------------------------
# Monte Carlo weighted quadratic deviation
# ---------------------------------------------------------------------------

def _product_log_weight(wf: WeightFunction, xs: np.ndarray) -> np.ndarray:
    """log prod_i phi(x_ij) along axis 1, stable for exponential weights."""
    if wf.kind == "exponential" and np.ndim(wf.gamma) == 0:
        return float(wf.gamma) * xs.sum(axis=1)
    with np.errstate(divide="ignore"):
        return np.log(wf(xs)).sum(axis=1)


def _mc_weighted_deviation(model, wf, theta, n, est, trials, rng,
                           power: float = 1.0):
    """Mean and stderr of phi^{(n)}(X)^power * |theta*(X) - theta|^2."""
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        t = min(_MC_CHUNK, trials - done)
        xs = model.sampler(rng, theta, (t, n))
        lw = _product_log_weight(wf, xs) * power
        v = np.exp(lw) * (est.fn(xs) - theta) ** 2
        total += float(v.sum())
        total_sq += float((v * v).sum())
        done += t
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0)
    return mean, math.sqrt(var / trials)


def _mc_weighted_mean_estimate(model, wf, theta, n, est, trials, rng):
    """Monte Carlo W(theta) = E[phi^{(n)} theta*] with stderr."""
    total = 0.0
    total_sq = 0.0
    done = 0
    while done < trials:
        t = min(_MC_CHUNK, trials - done)
        xs = model.sampler(rng, theta, (t, n))
        v = np.exp(_product_log_weight(wf, xs)) * est.fn(xs)
        total += float(v.sum())
        total_sq += float((v * v).sum())
        done += t
    mean = total / trials
    var = max(total_sq / trials - mean * mean, 0.0)
    return mean, math.sqrt(var / trials)


def _bias_prime_mc(model, wf, theta, n, est, cfg, trials, seed) -> tuple:
    """Central-difference d/dtheta of b(theta) = W(theta) - E(theta)^n theta,
    with common random numbers across the two evaluation points."""
    h = 1e-3 * max(1.0, abs(theta))
    out = []
    for th in (theta + h, theta - h):
        rng = np.random.default_rng(np.random.SeedSequence(seed))  # CRN
        w, se = _mc_weighted_mean_estimate(model, wf, th, n, est, trials, rng)
        e = _mean_weight(model, wf, th, cfg)
        out.append((w - e ** n * th, se))
    bp = (out[0][0] - out[1][0]) / (2 * h)
    se = math.hypot(out[0][1], out[1][1]) / (2 * h)
    return bp, se


# ---------------------------------------------------------------------------
# Cramer-Rao bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CramerRaoResult:
    version: str
    theta: float
    n: int
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float = 0.0
    details: dict = field(default_factory=dict)

    @property
    def holds_3sigma(self) -> bool:
        slack = 3.0 * math.hypot(self.lhs_stderr, self.rhs_stderr)
        return self.lhs >= self.rhs - slack


def cramer_rao_A(model: ParametricModel, wf: WeightFunction, theta: float, n: int,
                 est: EstimatorSpec, cfg: IntegrationConfig,
                 trials: int = 1_000_000, seed: int = 0) -> CramerRaoResult:
    """Version A: lhs = E[phi^{(n)} |theta*-theta|^2] against R(theta, n)."""
    if model.d != 1:
        raise IllegalParameterError("deviation bounds implemented for scalar theta")
    model.check(theta)
    check_regularity(model, wf, theta, cfg)
    aux = weighted_fisher_aux(model, wf, theta, cfg)
    info = weighted_fisher(model, wf, theta, cfg)
    e, ep = aux.E, aux.scalar_grad_E

    if est.bias_prime is not None:
        bp, bp_se = est.bias_prime(theta, n), 0.0
    else:
        bp, bp_se = _bias_prime_mc(model, wf, theta, n, est, cfg,
                                   max(trials // 4, 50_000), seed + 1)

    denom = n * info * e ** (n - 1) + n * (n - 1) * ep * ep * e ** (n - 2)
    rhs = (e ** n + bp) ** 2 / denom
    rhs_se = 2.0 * abs(e ** n + bp) * bp_se / denom

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lhs, lhs_se = _mc_weighted_deviation(model, wf, theta, n, est, trials, rng)
    return CramerRaoResult(
        version="A", theta=theta, n=n, lhs=lhs, lhs_stderr=lhs_se,
        rhs=rhs, rhs_stderr=rhs_se,
        details={"E": e, "E_prime": ep, "I_w": info, "bias_prime": bp})


def _sqrt_weight_mass(model, wf, theta, cfg) -> float:
    """s(theta) = E_theta[phi(X)^{1/2}]."""
    dist = model.make_distribution(theta)
    f = lambda x: np.sqrt(wf(x)) * dist.density(x)
    half_wf = WeightFunction.exponential(wf.gamma / 2.0) \
        if wf.kind == "exponential" and np.ndim(wf.gamma) == 0 else None
    val, _ = integrate(f, model.support, cfg, dists=(dist,), wf=half_wf)
    return val


def cramer_rao_B(model: ParametricModel, wf: WeightFunction, theta: float, n: int,
                 est: EstimatorSpec, cfg: IntegrationConfig,
                 trials: int = 1_000_000, seed: int = 0) -> CramerRaoResult:
    """Version B: same lhs against S(theta, n) built from s(theta) and the
    unweighted Fisher information."""
    if model.d != 1:
        raise IllegalParameterError("deviation bounds implemented for scalar theta")
    model.check(theta)
    check_regularity(model, wf, theta, cfg)
    one = WeightFunction.constant(1.0)
    info_plain = weighted_fisher(model, one, theta, cfg)
    s = _sqrt_weight_mass(model, wf, theta, cfg)

    if est.c_prime is not None:
        cp = est.c_prime(theta, n)
        cp_se = 0.0
    else:
        raise IllegalParameterError(
            "version B needs the analytic square-root-weight bias derivative")

    rhs = (s ** n + cp) ** 2 / (n * info_plain)
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    lhs, lhs_se = _mc_weighted_deviation(model, wf, theta, n, est, trials, rng)
    return CramerRaoResult(
        version="B", theta=theta, n=n, lhs=lhs, lhs_stderr=lhs_se,
        rhs=rhs, rhs_stderr=cp_se,
        details={"s": s, "I": info_plain, "c_prime": cp})


# ---------------------------------------------------------------------------
# van Trees bounds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PriorSpec:
    """Smooth prior on the scalar parameter: gaussian or a compact bump."""

    kind: str                  # "gaussian" | "bump"
    mean: float = 0.0
    var: float = 1.0
    center: float = 0.0
    width: float = 1.0

    def pdf(self, th):
        th = np.asarray(th, dtype=float)
        if self.kind == "gaussian":
            return np.exp(-((th - self.mean) ** 2) / (2 * self.var)) \
                / math.sqrt(2 * math.pi * self.var)
        u = (th - self.center) / self.width
        inside = np.abs(u) < 1.0
        out = np.zeros_like(th, dtype=float)
        out[inside] = np.exp(-1.0 / (1.0 - u[inside] ** 2))
        return out / (self.width * _BUMP_NORM)

    def grad_log_pdf(self, th):
        th = np.asarray(th, dtype=float)
        if self.kind == "gaussian":
            return -(th - self.mean) / self.var
        u = (th - self.center) / self.width
        with np.errstate(divide="ignore", invalid="ignore"):
            g = np.where(np.abs(u) < 1, -2.0 * u / (1.0 - u * u) ** 2, 0.0)
        return g / self.width

    def quadrature(self, level: int = 32):
        """Nodes/weights approximating integrals against the prior."""
        if self.kind == "gaussian":
            x, w = np.polynomial.hermite_e.hermegauss(level)
            nodes = self.mean + math.sqrt(self.var) * x
            return nodes, w / math.sqrt(2 * math.pi)
        xs = np.linspace(self.center - self.width, self.center + self.width,
                         4 * level + 1)
        ps = self.pdf(xs)
        w = np.full(xs.size, xs[1] - xs[0])
        w[0] = w[-1] = 0.5 * (xs[1] - xs[0])
        w = w * ps
        return xs, w / w.sum()


_BUMP_NORM = 0.443993816168450  # int_{-1}^{1} exp(-1/(1-u^2)) du


@dataclass(frozen=True)
class VanTreesResult:
    version: str
    n: int
    lhs: float
    lhs_stderr: float
    rhs: float
    details: dict = field(default_factory=dict)

    @property
    def holds_3sigma(self) -> bool:
        return self.lhs >= self.rhs - 3.0 * self.lhs_stderr


def van_trees(model: ParametricModel, wf: WeightFunction, n: int,
              est: EstimatorSpec, prior: PriorSpec, version: str,
              cfg: IntegrationConfig, trials: int = 200_000, seed: int = 0,
              level: int = 32) -> VanTreesResult:
    """Prior-averaged weighted quadratic deviation against versions A/B/C.

    lhs integrates the per-theta Monte Carlo deviation over the prior with
    common random numbers across prior nodes; version C uses the weighted
    Fisher information density of the prior.
    """
    if version not in ("A", "B", "C"):
        raise IllegalParameterError("version must be A, B, or C")
    if model.d != 1:
        raise IllegalParameterError("deviation bounds implemented for scalar theta")
    nodes, weights = prior.quadrature(level)
    check_regularity(model, wf, float(nodes[len(nodes) // 2]), cfg)

    # common random numbers: one standard-normal block reused on every node
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    zs = rng.standard_normal((trials, n))
    lhs = 0.0
    lhs_se = 0.0
    for th, w in zip(nodes, weights):
        xs = _shift_samples(model, float(th), zs, rng)
        lw = _product_log_weight(wf, xs)
        v = np.exp(lw) * (est.fn(xs) - float(th)) ** 2
        m = float(v.mean())
        se = float(v.std(ddof=1) / math.sqrt(trials))
        lhs += float(w) * m
        lhs_se += float(w) * se  # CRN couples the nodes; sum is a safe upper bound

    details: dict = {}
    if version in ("A", "B"):
        rhs = 0.0
        for th, w in zip(nodes, weights):
            if version == "A":
                res = _pointwise_rhs_A(model, wf, float(th), n, est, cfg)
            else:
                res = _pointwise_rhs_B(model, wf, float(th), n, est, cfg)
            rhs += w * res
    else:
        e_pow = np.array([_mean_weight(model, wf, float(t), cfg) ** n for t in nodes])
        numer = float(np.sum(weights * e_pow)) ** 2
        j_term = float(np.sum(weights * e_pow * prior.grad_log_pdf(nodes) ** 2))
        tr_iw = np.array([weighted_fisher(model, wf, float(t), cfg) for t in nodes])
        grad_e = np.array([weighted_fisher_aux(model, wf, float(t), cfg).scalar_grad_E
                           for t in nodes])
        t_val = j_term + n * float(np.sum(weights * tr_iw)) \
            + n * (n - 1) * float(np.sum(weights * grad_e ** 2))
        rhs = numer / t_val
        details = {"T": t_val, "prior_information": j_term}

    return VanTreesResult(version=version, n=n, lhs=lhs, lhs_stderr=lhs_se,
                          rhs=rhs, details=details)


def _shift_samples(model, theta, zs, rng):
    """Reuse one standard-normal block across prior nodes when the model is a
    location/scale transform of it; fall back to fresh draws otherwise."""
    if model.name == "gaussian-shift":
        sigma = math.sqrt(model.make_distribution(0.0).params["sigma2"])
        return theta + sigma * zs
    if model.name == "gaussian-scale":
        return theta * zs
    return model.sampler(rng, theta, zs.shape)


def _pointwise_rhs_A(model, wf, theta, n, est, cfg) -> float:
    aux = weighted_fisher_aux(model, wf, theta, cfg)
    info = weighted_fisher(model, wf, theta, cfg)
    bp = est.bias_prime(theta, n) if est.bias_prime is not None else 0.0
    denom = n * info * aux.E ** (n - 1) \
        + n * (n - 1) * aux.scalar_grad_E ** 2 * aux.E ** (n - 2)
    return (aux.E ** n + bp) ** 2 / denom


def _pointwise_rhs_B(model, wf, theta, n, est, cfg) -> float:
    one = WeightFunction.constant(1.0)
    info = weighted_fisher(model, one, theta, cfg)
    s = _sqrt_weight_mass(model, wf, theta, cfg)
    cp = est.c_prime(theta, n) if est.c_prime is not None else 0.0
    return (s ** n + cp) ** 2 / (n * info)
