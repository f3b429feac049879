"""Outcome spaces, weight functions, densities, and the shared numerical engines.

Conventions
-----------
* Finite alphabets are indexed 0..m-1; pmfs, weight tables, and decision rules
  are plain float vectors over those indices.  The reference measure is
  counting measure.
* Countable supports are the nonnegative integers with counting measure
  (needed for the Poisson catalog family); series are summed adaptively in
  blocks until the running tail drops below ``tail_mass_bound``.
* Continuous supports (real line, half line, d-vectors) carry Lebesgue
  measure.  Unbounded integrals are truncated to a window on which the
  integrand's tail mass is provably below ``tail_mass_bound``; windows come
  from distribution envelope hints (center/scale/tail kind) widened by the
  weight function's exponential growth rate.
* Everything is immutable after construction and pure, so callers may use any
  parallelism they like.  Monte Carlo uses numpy ``SeedSequence`` spawning so
  parallel and serial runs with one master seed agree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import (
    DomainMismatchError,
    IllegalParameterError,
    NonConvergentIntegralError,
    NoSamplerError,
)

__all__ = [
    "Support",
    "WeightFunction",
    "Distribution",
    "FiniteDistribution",
    "IntegrationConfig",
    "integrate",
    "weighted_expectation",
    "sample",
    "spawn_rngs",
    "finite_difference_gradient",
    "gauss_hermite_nodes",
]

_GAUSSIAN_TAIL_SIGMAS = 14.0  # one-sided Gaussian tail beyond 14 sigma < 1e-43
_EXP_TAIL_SLACK = 80.0  # covers polynomial prefactors on exponential tails
_MAX_SERIES_TERMS = 200_000


# ---------------------------------------------------------------------------
# outcome spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Support:
    """An outcome space together with its (implied) reference measure."""

    kind: str  # "finite" | "real-line" | "half-line" | "real-vector" | "counting"
    m: int = 0                      # alphabet size (finite)
    labels: tuple = ()              # optional outcome labels (finite)
    lower: float = 0.0              # left endpoint (half-line)
    d: int = 1                      # dimension (real-vector)

    def __post_init__(self):
        if self.kind == "finite":
            if self.m < 1:
                raise IllegalParameterError("finite alphabet needs m >= 1")
            if self.labels and len(set(self.labels)) != self.m:
                raise IllegalParameterError("labels must be distinct and match m")
        elif self.kind == "real-vector":
            if not 1 <= self.d <= 8:
                raise IllegalParameterError("vector support limited to 1 <= d <= 8")
        elif self.kind not in ("real-line", "half-line", "counting"):
            raise IllegalParameterError(f"unknown support kind {self.kind!r}")

    @property
    def reference_measure(self) -> str:
        return "counting" if self.kind in ("finite", "counting") else "lebesgue"

    @property
    def is_discrete(self) -> bool:
        return self.reference_measure == "counting"

    def same_space(self, other: "Support") -> bool:
        if self.kind != other.kind:
            return False
        if self.kind == "finite":
            return self.m == other.m
        if self.kind == "real-vector":
            return self.d == other.d
        if self.kind == "half-line":
            return self.lower == other.lower
        return True

    @staticmethod
    def finite(m: int, labels: Sequence = ()) -> "Support":
        return Support(kind="finite", m=m, labels=tuple(labels))

    @staticmethod
    def real_line() -> "Support":
        return Support(kind="real-line")

    @staticmethod
    def half_line(lower: float = 0.0) -> "Support":
        return Support(kind="half-line", lower=lower)

    @staticmethod
    def real_vector(d: int) -> "Support":
        return Support(kind="real-vector", d=d)

    @staticmethod
    def counting() -> "Support":
        return Support(kind="counting")


# ---------------------------------------------------------------------------
# weight functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative value/importance function phi on an outcome space.

    ``gamma`` of the exponential spec may be a scalar (phi(x)=e^{gamma x}) or a
    length-d vector (phi(x)=e^{x.gamma}).  ``coeffs`` are ascending polynomial
    coefficients.  ``values`` is the table over a finite alphabet.  The
    Laplace transform (and derivative) is available in closed form for the
    constant/exponential/polynomial/absolute specs on the half line.
    """

    kind: str  # "constant" | "exponential" | "polynomial" | "absolute" | "table" | "product"
    c: float = 1.0
    gamma: float | tuple = 0.0
    coeffs: tuple = ()
    values: tuple = ()
    factors: tuple = ()  # inner WeightFunctions for the product spec

    def __post_init__(self):
        if self.kind == "constant" and self.c < 0:
            raise IllegalParameterError("constant weight must be >= 0")
        if self.kind == "table":
            v = np.asarray(self.values, dtype=float)
            if v.size == 0 or np.any(v < 0):
                raise IllegalParameterError("table weights must be nonnegative")
        if self.kind == "polynomial":
            if len(self.coeffs) == 0:
                raise IllegalParameterError("polynomial weight needs coefficients")
            self._check_poly_nonnegative()
        if self.kind not in ("constant", "exponential", "polynomial", "absolute",
                             "table", "product"):
            raise IllegalParameterError(f"unknown weight kind {self.kind!r}")

    def _check_poly_nonnegative(self):
        c = np.asarray(self.coeffs, dtype=float)
        if len(c) == 3 and c[2] == 1.0:
            # monic quadratic x^2 + bx + c admitted iff c >= b^2/4
            if c[0] < c[1] ** 2 / 4.0 - 1e-12:
                raise IllegalParameterError("x^2+bx+c requires c >= b^2/4")
            return
        # generic certificate: minimum over stationary points and +-inf behavior
        if len(c) > 1:
            if len(c) % 2 == 0 or c[-1] < 0:
                raise IllegalParameterError("polynomial weight unbounded below")
            der = np.polynomial.polynomial.polyder(c)
            roots = np.roots(der[::-1])
            real = roots[np.abs(roots.imag) < 1e-9].real
            vals = np.polynomial.polynomial.polyval(real, c) if real.size else np.array([c[0]])
            if np.min(vals) < -1e-12:
                raise IllegalParameterError("polynomial weight takes negative values")
        elif c[0] < 0:
            raise IllegalParameterError("constant term must be >= 0")

    # -- evaluation ---------------------------------------------------------

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "constant":
            return np.full(x.shape if x.ndim else (), self.c, dtype=float)
        if self.kind == "exponential":
            g = self.gamma
            if np.ndim(g) == 0:
                return np.exp(float(g) * x)
            return np.exp(x @ np.asarray(g, dtype=float))
        if self.kind == "polynomial":
            return np.polynomial.polynomial.polyval(x, np.asarray(self.coeffs, dtype=float))
        if self.kind == "absolute":
            return np.abs(x)
        if self.kind == "table":
            idx = np.asarray(x, dtype=int)
            return np.asarray(self.values, dtype=float)[idx]
        if self.kind == "product":
            out = np.ones(x.shape[:-1] if x.ndim > 1 else (), dtype=float)
            for i, f in enumerate(self.factors):
                out = out * f(x[..., i])
            return out
        raise AssertionError(self.kind)

    def log_value(self, x):
        """log phi(x); -inf where phi vanishes."""
        with np.errstate(divide="ignore"):
            if self.kind == "exponential":
                g = self.gamma
                x = np.asarray(x, dtype=float)
                if np.ndim(g) == 0:
                    return float(g) * x
                return x @ np.asarray(g, dtype=float)
            return np.log(self(x))

    def vector_values(self, pts) -> np.ndarray:
        """Evaluate on (N, d) outcome points (real-vector supports)."""
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        if self.kind == "constant":
            return np.full(pts.shape[0], self.c)
        if self.kind == "exponential" and np.ndim(self.gamma) > 0:
            return np.exp(pts @ np.asarray(self.gamma, dtype=float))
        if self.kind == "product":
            return self(pts)
        raise DomainMismatchError(
            f"weight spec {self.kind!r} is not defined on vector outcomes")

    # -- hints used by the integration engine -------------------------------

    @property
    def kink_points(self) -> tuple:
        """Locations where the weight is non-smooth (quadrature hints)."""
        if self.kind == "absolute":
            return (0.0,)
        return ()

    @property
    def exp_rate(self) -> float:
        """Scalar exponential growth rate (0 for subexponential weights)."""
        if self.kind == "exponential" and np.ndim(self.gamma) == 0:
            return float(self.gamma)
        return 0.0

    @property
    def exp_rate_vector(self):
        if self.kind == "exponential" and np.ndim(self.gamma) > 0:
            return np.asarray(self.gamma, dtype=float)
        return None

    # -- Laplace transform (half-line weights; Appendix-style closed forms) --

    def laplace(self, s: float) -> Optional[float]:
        """phi_hat(s) = int_0^inf phi(x) e^{-sx} dx, when available in closed form."""
        if self.kind == "constant":
            return self.c / s
        if self.kind == "exponential" and np.ndim(self.gamma) == 0:
            g = float(self.gamma)
            return 1.0 / (s - g) if s > g else None
        if self.kind == "absolute":
            return 1.0 / s ** 2
        if self.kind == "polynomial":
            c = np.asarray(self.coeffs, dtype=float)
            return float(sum(ck * math.factorial(k) / s ** (k + 1) for k, ck in enumerate(c)))
        return None

    def laplace_prime(self, s: float) -> Optional[float]:
        if self.kind == "constant":
            return -self.c / s ** 2
        if self.kind == "exponential" and np.ndim(self.gamma) == 0:
            g = float(self.gamma)
            return -1.0 / (s - g) ** 2 if s > g else None
        if self.kind == "absolute":
            return -2.0 / s ** 3
        if self.kind == "polynomial":
            c = np.asarray(self.coeffs, dtype=float)
            return float(-sum(ck * math.factorial(k + 1) / s ** (k + 2) for k, ck in enumerate(c)))
        return None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def constant(c: float = 1.0) -> "WeightFunction":
        return WeightFunction(kind="constant", c=float(c))

    @staticmethod
    def exponential(gamma) -> "WeightFunction":
        if np.ndim(gamma) == 0:
            return WeightFunction(kind="exponential", gamma=float(gamma))
        return WeightFunction(kind="exponential", gamma=tuple(float(g) for g in gamma))

    @staticmethod
    def polynomial(coeffs: Sequence[float]) -> "WeightFunction":
        return WeightFunction(kind="polynomial", coeffs=tuple(float(v) for v in coeffs))

    @staticmethod
    def quadratic(b: float, c: float) -> "WeightFunction":
        """x^2 + bx + c with the nonnegativity certificate c >= b^2/4."""
        return WeightFunction.polynomial((c, b, 1.0))

    @staticmethod
    def absolute() -> "WeightFunction":
        return WeightFunction(kind="absolute")

    @staticmethod
    def table(values: Sequence[float]) -> "WeightFunction":
        return WeightFunction(kind="table", values=tuple(float(v) for v in values))

    @staticmethod
    def product(factors: Sequence["WeightFunction"]) -> "WeightFunction":
        return WeightFunction(kind="product", factors=tuple(factors))

    def table_on(self, support: Support) -> np.ndarray:
        """Evaluate as a vector over a finite alphabet."""
        if support.kind != "finite":
            raise DomainMismatchError("table_on needs a finite support")
        if self.kind == "table":
            v = np.asarray(self.values, dtype=float)
            if v.size != support.m:
                raise DomainMismatchError("weight table length != alphabet size")
            return v
        return np.asarray(self(np.arange(support.m)), dtype=float)


# ---------------------------------------------------------------------------
# distributions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FiniteDistribution:
    """A pmf over a finite alphabet: entries >= 0, summing to 1 within 1e-12."""

    pmf: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.pmf, dtype=float)
        object.__setattr__(self, "pmf", p)
        if p.ndim != 1 or p.size < 1:
            raise IllegalParameterError("pmf must be a 1-d vector")
        if np.any(p < -1e-15):
            raise IllegalParameterError("pmf entries must be nonnegative")
        if abs(float(p.sum()) - 1.0) > 1e-12:
            raise IllegalParameterError("pmf must sum to 1 within 1e-12")

    @property
    def m(self) -> int:
        return int(self.pmf.size)


@dataclass(frozen=True)
class Distribution:
    """Density w.r.t. the support's reference measure, plus envelope metadata.

    ``center``/``scale``/``tail`` describe a decay envelope used to truncate
    unbounded integrals; ``family``/``params`` tag catalog members so closed
    forms can be recognized.  ``sampler(rng, size)`` is the optional seeded
    sampler contract.
    """

    support: Support
    pdf: Optional[Callable] = None
    finite: Optional[FiniteDistribution] = None
    sampler: Optional[Callable] = None
    family: str = ""
    params: dict = field(default_factory=dict)
    center: object = 0.0          # float, or vector for real-vector supports
    scale: object = 1.0           # float, or covariance for real-vector supports
    tail: str = "gaussian"        # "gaussian" | "exponential" | "bounded"
    window: Optional[tuple] = None  # explicit (lo, hi) truncation override
    logpdf: Optional[Callable] = None  # analytic log-density (underflow-safe)

    def density(self, x):
        if self.finite is not None:
            return self.finite.pmf[np.asarray(x, dtype=int)]
        return np.asarray(self.pdf(x), dtype=float)

    def log_density(self, x):
        if self.logpdf is not None:
            return np.asarray(self.logpdf(x), dtype=float)
        with np.errstate(divide="ignore"):
            return np.log(self.density(x))

    def draw(self, rng: np.random.Generator, size: int):
        if self.sampler is None:
            raise NoSamplerError(f"distribution {self.family or '<anonymous>'} has no sampler")
        return self.sampler(rng, size)

    # -- catalog constructors ------------------------------------------------

    @staticmethod
    def from_pmf(pmf, labels: Sequence = ()) -> "Distribution":
        fin = FiniteDistribution(np.asarray(pmf, dtype=float))
        sup = Support.finite(fin.m, labels)

        def _sampler(rng, size, _p=fin.pmf):
            return rng.choice(fin.m, size=size, p=_p / _p.sum())

        return Distribution(support=sup, finite=fin, sampler=_sampler,
                            family="pmf", tail="bounded")

    @staticmethod
    def gaussian(mu: float, sigma2: float) -> "Distribution":
        if sigma2 <= 0:
            raise IllegalParameterError("sigma2 must be > 0")
        sd = math.sqrt(sigma2)

        def _pdf(x, _mu=mu, _sd=sd):
            x = np.asarray(x, dtype=float)
            return np.exp(-((x - _mu) ** 2) / (2 * _sd * _sd)) / (math.sqrt(2 * math.pi) * _sd)

        return Distribution(
            support=Support.real_line(), pdf=_pdf,
            sampler=lambda rng, size: rng.normal(mu, sd, size=size),
            family="gaussian-scalar", params={"mu": mu, "sigma2": sigma2},
            center=mu, scale=sd, tail="gaussian")

    @staticmethod
    def gaussian_mv(mean, cov) -> "Distribution":
        mean = np.asarray(mean, dtype=float)
        cov = np.asarray(cov, dtype=float)
        d = mean.size
        try:
            chol = np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as exc:
            raise IllegalParameterError("covariance must be positive-definite") from exc
        inv = np.linalg.inv(cov)
        logdet = 2.0 * float(np.sum(np.log(np.diag(chol))))

        def _pdf(x, _m=mean, _inv=inv, _ld=logdet, _d=d):
            x = np.atleast_2d(np.asarray(x, dtype=float))
            dx = x - _m
            q = np.einsum("ni,ij,nj->n", dx, _inv, dx)
            out = np.exp(-0.5 * q - 0.5 * (_d * math.log(2 * math.pi) + _ld))
            return out if x.shape[0] > 1 else out[0]

        def _sampler(rng, size, _m=mean, _chol=chol, _d=d):
            z = rng.standard_normal(size=(size, _d))
            return _m + z @ _chol.T

        return Distribution(
            support=Support.real_vector(d), pdf=_pdf, sampler=_sampler,
            family="gaussian-multivariate", params={"mean": mean, "cov": cov},
            center=mean, scale=cov, tail="gaussian")

    @staticmethod
    def exponential(lam: float) -> "Distribution":
        if lam <= 0:
            raise IllegalParameterError("lam must be > 0")

        def _pdf(x, _l=lam):
            x = np.asarray(x, dtype=float)
            return np.where(x >= 0, _l * np.exp(-_l * np.where(x >= 0, x, 0.0)), 0.0)

        return Distribution(
            support=Support.half_line(0.0), pdf=_pdf,
            sampler=lambda rng, size: rng.exponential(1.0 / lam, size=size),
            family="exponential", params={"lam": lam},
            center=0.0, scale=1.0 / lam, tail="exponential")

    @staticmethod
    def gamma(lam: float, beta: float) -> "Distribution":
        """Gamma with shape lam > 0 and rate beta > 0."""
        if lam <= 0 or beta <= 0:
            raise IllegalParameterError("shape and rate must be > 0")
        from scipy.stats import gamma as _gamma
        fr = _gamma(a=lam, scale=1.0 / beta)

        return Distribution(
            support=Support.half_line(0.0), pdf=lambda x: fr.pdf(x),
            sampler=lambda rng, size: rng.gamma(lam, 1.0 / beta, size=size),
            family="gamma", params={"lam": lam, "beta": beta},
            center=0.0, scale=1.0 / beta, tail="exponential")

    @staticmethod
    def poisson(lam: float) -> "Distribution":
        if lam <= 0:
            raise IllegalParameterError("lam must be > 0")
        from scipy.stats import poisson as _poisson
        fr = _poisson(mu=lam)

        return Distribution(
            support=Support.counting(), pdf=lambda x: fr.pmf(np.asarray(x)),
            logpdf=lambda x: fr.logpmf(np.asarray(x)),
            sampler=lambda rng, size: rng.poisson(lam, size=size),
            family="poisson", params={"lam": lam},
            center=lam, scale=math.sqrt(lam), tail="exponential")


# ---------------------------------------------------------------------------
# integration / summation engines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegrationConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_subdivisions: int = 2000
    tail_mass_bound: float = 1e-14
    mc_samples: int = 100_000
    mc_seed: int = 0

    def __post_init__(self):
        if min(self.rel_tol, self.abs_tol, self.tail_mass_bound) <= 0:
            raise IllegalParameterError("tolerances must be strictly positive")
        if self.mc_samples < 1:
            raise IllegalParameterError("mc_samples must be >= 1")

    def with_seed(self, seed: int) -> "IntegrationConfig":
        return replace(self, mc_seed=int(seed))


def _window_for(support: Support, cfg: IntegrationConfig, dists: Sequence[Distribution],
                wf: Optional[WeightFunction]) -> tuple:
    """Truncation window covering every envelope, shifted for weight growth."""
    for d in dists:
        if d.window is not None:
            return d.window
    rate = wf.exp_rate if wf is not None else 0.0
    los, his = [], []
    for d in dists:
        c = float(np.asarray(d.center).reshape(-1)[0])
        s = float(d.scale) if np.ndim(d.scale) == 0 else 1.0
        if d.tail == "gaussian":
            c_eff = c + rate * s * s  # exponential tilt recenters a gaussian
            los.append(c_eff - _GAUSSIAN_TAIL_SIGMAS * s)
            his.append(c_eff + _GAUSSIAN_TAIL_SIGMAS * s)
        elif d.tail == "exponential":
            decay = 1.0 / s  # reference decay rate of the envelope
            if rate >= decay - 1e-12 and support.kind == "half-line":
                raise NonConvergentIntegralError(
                    "weight growth rate meets or exceeds the density decay rate")
            eff = decay - max(rate, 0.0)
            los.append(support.lower if support.kind == "half-line" else c - _EXP_TAIL_SLACK * s)
            his.append(c + (-math.log(cfg.tail_mass_bound) + _EXP_TAIL_SLACK) / eff)
        else:
            raise NonConvergentIntegralError(
                "unbounded support without an envelope hint; supply explicit window")
    lo, hi = min(los), max(his)
    if support.kind == "half-line":
        lo = max(lo, support.lower)
    return lo, hi


def integrate(f: Callable, support: Support, cfg: IntegrationConfig,
              dists: Sequence[Distribution] = (), wf: Optional[WeightFunction] = None,
              points: Sequence[float] = ()) -> tuple:
    """Integrate f against the support's reference measure.

    Returns ``(value, error_estimate)``.  ``dists`` supply envelope hints for
    truncating unbounded domains, ``wf`` contributes its growth rate, and
    ``points`` marks known kinks (e.g. density crossing points) passed to the
    adaptive subdivision.
    """
    if support.kind == "finite":
        vals = np.asarray(f(np.arange(support.m)), dtype=float)
        return float(np.sum(vals)), 0.0

    if support.kind == "counting":
        min_terms = 0
        for d in dists:
            c = float(np.asarray(d.center).reshape(-1)[0])
            s = float(d.scale) if np.ndim(d.scale) == 0 else 1.0
            min_terms = max(min_terms, int(c + 12.0 * s) + 1)
        return _sum_series(f, cfg, min_terms=min_terms)

    if support.kind == "real-vector":
        raise DomainMismatchError("vector integrands go through gauss_hermite_expectation")

    lo, hi = _window_for(support, cfg, dists, wf)
    hints = tuple(points) + (wf.kink_points if wf is not None else ())
    inner = sorted(p for p in hints if lo < p < hi)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        val, err = _adaptive_gk(f, lo, hi, cfg, inner)
    if not math.isfinite(val):
        raise NonConvergentIntegralError("integrand produced a non-finite value")
    if err > max(cfg.abs_tol * 100.0, cfg.rel_tol * 100.0 * abs(val), 1e-9 * max(1.0, abs(val))):
        raise NonConvergentIntegralError(
            f"quadrature error estimate {err:.3e} too large for value {val:.6e}")
    return float(val), float(err)


# Gauss-Kronrod 7/15 pair on [-1, 1]: Kronrod nodes, Kronrod weights, and the
# embedded Gauss weights (zero at the Kronrod-only nodes).
_GK_NODES = np.array([
    -0.991455371120813, -0.949107912342759, -0.864864423359769,
    -0.741531185599394, -0.586087235467691, -0.405845151377397,
    -0.207784955007898, 0.0, 0.207784955007898, 0.405845151377397,
    0.586087235467691, 0.741531185599394, 0.864864423359769,
    0.949107912342759, 0.991455371120813])
_GK_WK = np.array([
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728, 0.204432940075298,
    0.190350578064785, 0.169004726639267, 0.140653259715525,
    0.104790010322250, 0.063092092629979, 0.022935322010529])
_GK_WG = np.array([
    0.0, 0.129484966168870, 0.0, 0.279705391489277, 0.0,
    0.381830050505119, 0.0, 0.417959183673469, 0.0, 0.381830050505119,
    0.0, 0.279705391489277, 0.0, 0.129484966168870, 0.0])


def _gk_panels(f, los: np.ndarray, his: np.ndarray):
    """Vectorized G7/K15 evaluation on a batch of panels."""
    mid = 0.5 * (los + his)
    half = 0.5 * (his - los)
    xs = mid[:, None] + half[:, None] * _GK_NODES[None, :]
    vals = np.asarray(f(xs.reshape(-1)), dtype=float).reshape(xs.shape)
    ik = half * (vals @ _GK_WK)
    ig = half * (vals @ _GK_WG)
    diff = np.abs(ik - ig)
    # QUADPACK-style error heuristic for the embedded pair
    err = np.where(diff > 0, (200.0 * diff) ** 1.5, 0.0)
    err = np.minimum(err, np.maximum(diff * 200.0, np.finfo(float).tiny))
    return ik, err


def _adaptive_gk(f, lo: float, hi: float, cfg: IntegrationConfig,
                 inner_points: Sequence[float], n_base: int = 16) -> tuple:
    """Adaptive interval bisection with the embedded G7/K15 pair.

    Panels are evaluated in vectorized batches; each round splits every panel
    whose error exceeds its share of the budget, until the summed estimate
    meets max(abs_tol, rel_tol * |integral|) or the subdivision budget is hit.
    """
    edges = np.unique(np.concatenate([
        np.linspace(lo, hi, n_base + 1), np.asarray(inner_points, dtype=float)]))
    los, his = edges[:-1], edges[1:]
    vals, errs = _gk_panels(f, los, his)
    for _ in range(64):
        if not np.all(np.isfinite(vals)):
            raise NonConvergentIntegralError("integrand produced a non-finite value")
        total = float(np.sum(vals))
        tot_err = float(np.sum(errs))
        tol = max(cfg.abs_tol, cfg.rel_tol * abs(total))
        if tot_err <= tol or los.size >= cfg.max_subdivisions:
            return total, tot_err
        split = errs > 0.25 * tol / max(los.size, 1)
        if not np.any(split):
            split = errs >= np.max(errs)
        keep_lo, keep_hi = los[~split], his[~split]
        keep_v, keep_e = vals[~split], errs[~split]
        mids = 0.5 * (los[split] + his[split])
        new_lo = np.concatenate([los[split], mids])
        new_hi = np.concatenate([mids, his[split]])
        new_v, new_e = _gk_panels(f, new_lo, new_hi)
        los = np.concatenate([keep_lo, new_lo])
        his = np.concatenate([keep_hi, new_hi])
        vals = np.concatenate([keep_v, new_v])
        errs = np.concatenate([keep_e, new_e])
    return float(np.sum(vals)), float(np.sum(errs))


def _sum_series(f: Callable, cfg: IntegrationConfig, block: int = 64,
                min_terms: int = 0) -> tuple:
    """Adaptive block summation over l = 0, 1, 2, ... for counting supports.

    ``min_terms`` forces summation past the envelope's mass peak so quiet
    leading blocks (e.g. a Poisson with a large mean) cannot truncate early.
    """
    total = 0.0
    peak = 0.0
    start = 0
    quiet = 0
    while start < _MAX_SERIES_TERMS:
        ls = np.arange(start, start + block)
        vals = np.asarray(f(ls), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonConvergentIntegralError("series term not finite")
        bsum = float(np.sum(vals))
        babs = float(np.sum(np.abs(vals)))
        total += bsum
        peak = max(peak, babs)
        start += block
        if start >= min_terms \
                and babs <= cfg.tail_mass_bound * max(1.0, abs(total), peak):
            quiet += 1
            if quiet >= 2:  # two quiet blocks guard against slow starts
                return total, cfg.tail_mass_bound * max(1.0, abs(total))
        else:
            quiet = 0
    raise NonConvergentIntegralError("series did not converge within the term budget")


def weighted_expectation(wf: WeightFunction, g: Callable, support: Support,
                         cfg: IntegrationConfig, dists: Sequence[Distribution] = (),
                         points: Sequence[float] = ()) -> float:
    """E_phi(g) = integral of phi * g against the reference measure."""
    if support.kind == "finite":
        w = wf.table_on(support)
        vals = np.asarray(g(np.arange(support.m)), dtype=float)
        return float(np.sum(w * vals))
    val, _ = integrate(lambda x: wf(x) * np.asarray(g(x), dtype=float),
                       support, cfg, dists=dists, wf=wf, points=points)
    return val


def gauss_hermite_nodes(center, cov, level: int = 40) -> tuple:
    """Affinely mapped tensor Gauss-Hermite rule for integrals against N(center, cov).

    Returns ``(nodes, weights)`` with ``sum(w_i f(x_i)) ~= E_{N(center,cov)}[f]``.
    """
    center = np.atleast_1d(np.asarray(center, dtype=float))
    d = center.size
    cov = np.asarray(cov, dtype=float)
    if cov.ndim == 0:
        cov = np.eye(d) * float(cov)
    x, w = np.polynomial.hermite_e.hermegauss(level)
    w = w / math.sqrt(2 * math.pi)
    xg = np.meshgrid(*([x] * d), indexing="ij")
    wg = np.meshgrid(*([w] * d), indexing="ij")
    pts = np.stack([g.reshape(-1) for g in xg], axis=-1)
    wts = np.ones(pts.shape[0])
    for g in wg:
        wts = wts * g.reshape(-1)
    chol = np.linalg.cholesky(cov)
    return center + pts @ chol.T, wts


def gauss_hermite_expectation(f: Callable, center, cov, level: int = 48) -> float:
    """E_{N(center,cov)}[f] by tensor Gauss-Hermite (exact envelope assumed)."""
    nodes, wts = gauss_hermite_nodes(center, cov, level)
    vals = np.asarray(f(nodes), dtype=float)
    return float(np.sum(wts * vals))


# ---------------------------------------------------------------------------
# sampling and differentiation
# ---------------------------------------------------------------------------

def sample(dist: Distribution, n: int, seed: int):
    """Reproducible draws: identical (dist, n, seed) yields identical output."""
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    if n == 0:
        first = dist.draw(rng, 1)
        return np.asarray(first)[:0]
    return np.asarray(dist.draw(rng, n))


def spawn_rngs(master_seed: int, k: int) -> list:
    """k independent child generators; stable under the master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(master_seed).spawn(k)]


def finite_difference_gradient(f: Callable, theta, h: float = 1e-5) -> np.ndarray:
    """Central differences per coordinate with step h*max(1, |theta_l|).

    f receives arguments in the same form the caller supplied theta (bare
    scalar or vector).
    """
    scalar_arg = np.ndim(theta) == 0
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    grad = np.empty_like(theta)
    for l in range(theta.size):
        step = h * max(1.0, abs(theta[l]))
        up = theta.copy(); up[l] += step
        dn = theta.copy(); dn[l] -= step
        fu = f(float(up[0]) if scalar_arg else up)
        fd = f(float(dn[0]) if scalar_arg else dn)
        if not (math.isfinite(fu) and math.isfinite(fd)):
            raise NonConvergentIntegralError("finite differences hit a non-finite evaluation")
        grad[l] = (fu - fd) / (2 * step)
    return grad
