"""Command-line front end: problem ingestion, divergence computation,
verification sweeps, type-II exponent experiments, and bound experiments.

Subcommands
-----------
compute SPEC.json          weighted distances/divergences/entropies -> JSON
verify --suite NAME        randomized verification sweep -> JSON, exit 0 iff clean
steinsanov --spec SPEC     empirical vs limiting type-II exponent -> CSV
cramer-rao ...             weighted Cramer-Rao / van Trees experiment -> JSON

Exit codes: 0 success, 1 usage/schema error, 2 numerical failure (partial
report still emitted).  Reports are deterministic for a fixed seed; pass
``--reproducible`` to omit the wall-clock timestamp so reruns are
byte-identical.  The environment variable WINFER_THREADS caps worker
parallelism (the reference implementation evaluates serially, so any value
just pins the cap).

Problem-spec JSON schema (version 1):

    {
      "schema": 1,
      "seed": 0,
      "distributions": [DIST, DIST],
      "weight": WEIGHT,
      "quantities": ["tv", "kl", ...],
      "alpha_grid": [0.5],            # optional, for alpha-indexed quantities
      "integration": {"rel_tol": 1e-10, ...}   # optional overrides
    }

    DIST   = {"pmf": [..]} | {"family": NAME, "params": {..}, "window": [lo, hi]?}
    NAME   = exponential | poisson | gaussian-scalar | gaussian-multivariate | gamma
    WEIGHT = {"kind": "constant", "c": 1.0}
           | {"kind": "exponential", "gamma": g | [g..]}
           | {"kind": "quadratic", "b": b, "c": c}
           | {"kind": "polynomial", "coeffs": [c0, c1, ..]}
           | {"kind": "absolute"}
           | {"kind": "table", "values": [..]}

Quantities: tv, delta, hellinger, bhattacharyya-coeff, bhattacharyya-div, kl,
chernoff-coeff, chernoff-div, renyi-div, tsallis-div, shannon-entropy,
renyi-entropy, min-total-error, stein-sanov-limit, error-bounds.
Alpha-indexed quantities appear once per alpha_grid entry as "name@alpha".
When both distributions are catalog members of one exponential family (or the
unit-variance Gaussian TV pattern applies) the record carries an additional
closed-form cross-check value.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import os
import sys
import time
from typing import Optional

import numpy as np

from . import __version__
from .core import Distribution, IntegrationConfig, WeightFunction
from .divergence import (
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
    shannon_entropy,
    tsallis_div,
    weighted_tv,
)
from .errors import SchemaError, WinferError
from .estimation import (
    PriorSpec,
    cramer_rao_A,
    cramer_rao_B,
    gaussian_scale_model,
    gaussian_shift_model,
    mean_estimator,
    scale_abs_mean_estimator,
    shifted_mean_estimator,
    van_trees,
)
from .expfam import (
    AdjointFamily,
    catalog_family,
    expfam_bhattacharyya,
    expfam_chernoff,
    expfam_kl,
    expfam_renyi,
    expfam_shannon,
    gaussian_tv_closed_form,
)
from .testing import (
    ProductProblem,
    error_bound_report,
    min_total_error,
    stein_sanov_empirical,
    stein_sanov_limit,
)
from .verify import SUITES, run_suite

_QUANTITIES = ("tv", "delta", "hellinger", "bhattacharyya-coeff",
               "bhattacharyya-div", "kl", "chernoff-coeff", "chernoff-div",
               "renyi-div", "tsallis-div", "shannon-entropy", "renyi-entropy",
               "min-total-error", "stein-sanov-limit", "error-bounds")
_ALPHA_QUANTITIES = ("chernoff-coeff", "chernoff-div", "renyi-div",
                     "tsallis-div", "renyi-entropy")
_FAMILIES = ("exponential", "poisson", "gaussian-scalar",
             "gaussian-multivariate", "gamma")


def max_threads() -> int:
    """Parallelism cap from WINFER_THREADS (>= 1); evaluation is serial."""
    raw = os.environ.get("WINFER_THREADS", "1")
    try:
        val = int(raw)
    except ValueError as exc:
        raise SchemaError(f"WINFER_THREADS={raw!r} is not an integer") from exc
    return max(1, val)


# ---------------------------------------------------------------------------
# spec parsing
# ---------------------------------------------------------------------------

def _need(obj: dict, key: str, where: str):
    if key not in obj:
        raise SchemaError(f"missing {key!r} in {where}")
    return obj[key]


def parse_weight(spec: dict) -> WeightFunction:
    kind = _need(spec, "kind", "weight")
    try:
        if kind == "constant":
            return WeightFunction.constant(float(spec.get("c", 1.0)))
        if kind == "exponential":
            return WeightFunction.exponential(_need(spec, "gamma", "weight"))
        if kind == "quadratic":
            return WeightFunction.quadratic(float(_need(spec, "b", "weight")),
                                            float(_need(spec, "c", "weight")))
        if kind == "polynomial":
            return WeightFunction.polynomial(_need(spec, "coeffs", "weight"))
        if kind == "absolute":
            return WeightFunction.absolute()
        if kind == "table":
            return WeightFunction.table(_need(spec, "values", "weight"))
    except WinferError as exc:
        raise SchemaError(f"invalid weight: {exc}") from exc
    raise SchemaError(f"unknown weight kind {kind!r}")


def parse_distribution(spec: dict) -> Distribution:
    if "pmf" in spec:
        try:
            return Distribution.from_pmf(spec["pmf"], spec.get("labels", ()))
        except WinferError as exc:
            raise SchemaError(f"invalid pmf: {exc}") from exc
    name = _need(spec, "family", "distribution")
    if name not in _FAMILIES:
        raise SchemaError(f"unknown family {name!r}; catalog: {_FAMILIES}")
    params = _need(spec, "params", "distribution")
    try:
        dist = catalog_family(name, **params).dist
    except (WinferError, TypeError, KeyError) as exc:
        raise SchemaError(f"invalid {name} params: {exc}") from exc
    if "window" in spec:
        lo, hi = spec["window"]
        dist = dataclasses.replace(dist, window=(float(lo), float(hi)))
    return dist


def parse_integration(spec: dict) -> IntegrationConfig:
    allowed = {f.name for f in dataclasses.fields(IntegrationConfig)}
    unknown = set(spec) - allowed
    if unknown:
        raise SchemaError(f"unknown integration keys {sorted(unknown)}")
    try:
        return IntegrationConfig(**spec)
    except (WinferError, TypeError) as exc:
        raise SchemaError(f"invalid integration config: {exc}") from exc


def parse_problem_spec(spec: dict):
    if not isinstance(spec, dict):
        raise SchemaError("spec must be a JSON object")
    if spec.get("schema", 1) != 1:
        raise SchemaError("unsupported schema version")
    dists = _need(spec, "distributions", "spec")
    if not isinstance(dists, list) or not 1 <= len(dists) <= 2:
        raise SchemaError("distributions must list one or two entries")
    parsed = [parse_distribution(d) for d in dists]
    wf = parse_weight(_need(spec, "weight", "spec"))
    quantities = _need(spec, "quantities", "spec")
    for qn in quantities:
        if qn not in _QUANTITIES:
            raise SchemaError(f"unknown quantity {qn!r}")
    alphas = [float(a) for a in spec.get("alpha_grid", [0.5])]
    for a in alphas:
        if not 0 < a <= 1:
            raise SchemaError("alpha_grid entries must lie in (0, 1]")
    cfg = parse_integration(spec.get("integration", {}))
    seed = int(spec.get("seed", 0))
    return parsed, wf, list(quantities), alphas, cfg, seed


# ---------------------------------------------------------------------------
# closed-form cross-checks
# ---------------------------------------------------------------------------

def _catalog_adjoint(p: Distribution, q: Optional[Distribution],
                     wf: WeightFunction, cfg: IntegrationConfig):
    """(adjoint, theta_p, theta_q) when the pair lives in one catalog family."""
    if p.family not in _FAMILIES or p.family == "pmf":
        return None
    if q is not None and q.family != p.family:
        return None
    try:
        m1 = catalog_family(p.family, **p.params)
        m2 = catalog_family(q.family, **q.params) if q is not None else None
        adj = AdjointFamily(m1.family, wf, cfg)
        return adj, m1.theta, (m2.theta if m2 is not None else None)
    except WinferError:
        return None


def _tv_closed_form(p: Distribution, q: Distribution, wf: WeightFunction,
                    as_printed: bool) -> Optional[float]:
    if p.family != "gaussian-scalar" or q.family != "gaussian-scalar":
        return None
    if abs(p.params.get("sigma2", 0) - 1.0) > 0 or abs(q.params.get("sigma2", 0) - 1.0) > 0:
        return None
    if p.params.get("mu", 1) != 0 or q.params.get("mu", -1) < 0:
        return None
    try:
        return gaussian_tv_closed_form(float(q.params["mu"]), wf, as_printed=as_printed)
    except WinferError:
        return None


# ---------------------------------------------------------------------------
# compute
# ---------------------------------------------------------------------------

def _record(name: str, value: float, err: float, method: str, **extra) -> dict:
    rec = {"name": name, "value": value, "numerical_error": err, "method": method}
    rec.update(extra)
    return rec


def compute_report(spec: dict, as_printed: bool = False) -> tuple:
    """Evaluate every requested quantity; returns (report, exit_code)."""
    dists, wf, quantities, alphas, cfg, seed = parse_problem_spec(spec)
    p = dists[0]
    q = dists[1] if len(dists) > 1 else None
    pair_needed = {"tv", "delta", "hellinger", "bhattacharyya-coeff",
                   "bhattacharyya-div", "kl", "chernoff-coeff", "chernoff-div",
                   "renyi-div", "tsallis-div", "min-total-error",
                   "stein-sanov-limit", "error-bounds"}
    records = []
    bound_checks = []
    exit_code = 0
    closed = _catalog_adjoint(p, q, wf, cfg)

    def cross_check(name, alpha=None):
        if closed is None:
            return None
        adj, th1, th2 = closed
        try:
            if name == "kl" and th2 is not None:
                return expfam_kl(adj, th1, th2)
            if name == "shannon-entropy":
                return expfam_shannon(adj, th1)
            if name == "renyi-entropy" and alpha is not None and alpha < 1:
                return expfam_renyi(adj, th1, alpha)
            if name == "chernoff-div" and th2 is not None and alpha is not None \
                    and alpha < 1:
                return expfam_chernoff(adj, th1, th2, alpha)
            if name == "bhattacharyya-div" and th2 is not None:
                return expfam_bhattacharyya(adj, th1, th2)
        except WinferError:
            return None
        return None

    for name in quantities:
        if name in pair_needed and q is None:
            raise SchemaError(f"{name} needs two distributions")
        prob = HypothesisProblem(p, q, wf) if q is not None else None
        try:
            if name in _ALPHA_QUANTITIES:
                for a in alphas:
                    rec = _compute_alpha_quantity(name, prob, p, wf, a, cfg)
                    cc = cross_check(name, a)
                    if cc is not None:
                        rec["closed_form"] = {"value": cc, "method": "closed-form"}
                    records.append(rec)
                continue
            rec = _compute_plain_quantity(name, prob, p, q, wf, cfg, bound_checks)
            if rec is not None:
                cc = cross_check(name)
                if name == "tv" and q is not None:
                    tvcc = _tv_closed_form(p, q, wf, as_printed)
                    if tvcc is not None:
                        rec["closed_form"] = {"value": tvcc, "method": "closed-form",
                                              "as_printed": as_printed}
                elif cc is not None:
                    rec["closed_form"] = {"value": cc, "method": "closed-form"}
                records.append(rec)
        except WinferError as exc:
            records.append({"name": name, "error": str(exc)})
            exit_code = 2

    for rec in records:
        val = rec.get("value")
        if val is not None and isinstance(val, float) and math.isnan(val):
            rec["error"] = "NaN result"
            exit_code = 2

    report = {
        "schema": 1,
        "tool": "winfer",
        "version": __version__,
        "seed": seed,
        "config_hash": hashlib.sha256(
            json.dumps(spec, sort_keys=True).encode()).hexdigest(),
        "quantities": records,
        "bound_checks": bound_checks,
    }
    return report, exit_code


def _compute_alpha_quantity(name, prob, p, wf, a, cfg) -> dict:
    label = f"{name}@{a:g}"
    if name == "chernoff-coeff":
        return _record(label, chernoff_coeff(prob, a, cfg), 0.0,
                       "exact-sum" if prob.support.kind == "finite" else "quadrature",
                       alpha=a)
    if name == "chernoff-div":
        dv = chernoff_div(prob, a, cfg)
        return _record(label, dv.value, dv.error, dv.method, alpha=a)
    if name == "renyi-div":
        dv = renyi_div(prob, a, cfg)
        return _record(label, dv.value, dv.error, dv.method, alpha=a)
    if name == "tsallis-div":
        dv = tsallis_div(prob, a, cfg)
        return _record(label, dv.value, dv.error, dv.method, alpha=a)
    if name == "renyi-entropy":
        if a >= 1:
            raise SchemaError("renyi-entropy needs alpha in (0, 1)")
        val = renyi_entropy(p, wf, a, cfg)
        method = "exact-sum" if p.support.kind == "finite" else (
            "series" if p.support.kind == "counting" else "quadrature")
        return _record(label, val, 0.0, method, alpha=a)
    raise AssertionError(name)


def _compute_plain_quantity(name, prob, p, q, wf, cfg, bound_checks) -> Optional[dict]:
    discrete = p.support.kind in ("finite", "counting")
    plain_method = "exact-sum" if p.support.kind == "finite" else (
        "series" if p.support.kind == "counting" else "quadrature")
    if name == "tv":
        dv = weighted_tv(prob, cfg)
        return _record(name, dv.value, dv.error, dv.method)
    if name == "delta":
        return _record(name, delta(prob, cfg), 0.0, plain_method)
    if name == "hellinger":
        return _record(name, hellinger(prob, cfg), 0.0, plain_method)
    if name == "bhattacharyya-coeff":
        return _record(name, bhattacharyya_coeff(prob, cfg), 0.0, plain_method)
    if name == "bhattacharyya-div":
        dv = bhattacharyya_div(prob, cfg)
        return _record(name, dv.value, dv.error, dv.method)
    if name == "kl":
        dv = kl(prob, cfg)
        return _record(name, dv.value, dv.error, dv.method)
    if name == "shannon-entropy":
        return _record(name, shannon_entropy(p, wf, cfg), 0.0, plain_method)
    if name == "min-total-error":
        return _record(name, min_total_error(prob, cfg), 0.0, plain_method)
    if name == "stein-sanov-limit":
        return _record(name, stein_sanov_limit(prob, cfg), 0.0, plain_method)
    if name == "error-bounds":
        rep = error_bound_report(prob, cfg)
        for label, lhs, rhs in (
                ("rho^2/(2Delta) <= Delta - sqrt(Delta^2-rho^2)",
                 rep.lower_affinity, rep.lower_sqrt),
                ("Delta - sqrt(Delta^2-rho^2) <= min-total-error",
                 rep.lower_sqrt, rep.min_total),
                ("min-total-error <= rho", rep.min_total, rep.upper_affinity),
                ("tau <= corrected bretagnolle-huber", rep.tau, rep.bh_corrected_bound)):
            bound_checks.append({"check": label, "lhs": lhs, "rhs": rhs,
                                 "passed": bool(lhs <= rhs + 1e-9 * max(1.0, abs(rhs)))})
        if rep.pinsker_applicable and math.isfinite(rep.kl):
            bound_checks.append({"check": "tau <= pinsker", "lhs": rep.tau,
                                 "rhs": rep.pinsker_bound,
                                 "passed": bool(rep.tau <= rep.pinsker_bound + 1e-9)})
        return _record(name, rep.min_total, 0.0, plain_method,
                       details={"delta": rep.delta, "rho": rep.rho, "tau": rep.tau,
                                "kl": rep.kl if math.isfinite(rep.kl) else "inf",
                                "ep": rep.ep, "eq": rep.eq})
    raise AssertionError(name)


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------

def _json_default(obj):
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON-serializable: {type(obj)!r}")


def _emit_json(report: dict, out: Optional[str], reproducible: bool) -> None:
    if not reproducible:
        report = dict(report)
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=True,
                      default=_json_default)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _load_spec(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise SchemaError(f"spec file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise SchemaError(f"spec is not valid JSON: {exc}") from exc


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_compute(args) -> int:
    spec = _load_spec(args.spec)
    report, code = compute_report(spec, as_printed=args.as_printed)
    _emit_json(report, args.out, args.reproducible)
    return code


def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise SchemaError(f"unknown suite {args.suite!r}; choose from {sorted(SUITES)}")
    rep = run_suite(args.suite, args.instances, args.seed)
    out = {
        "schema": 1,
        "tool": "winfer",
        "version": __version__,
        "seed": args.seed,
        "report": rep.to_dict(),
    }
    _emit_json(out, args.out, args.reproducible)
    return 0 if rep.passed else 2


def cmd_steinsanov(args) -> int:
    spec = _load_spec(args.spec)
    dists, wf, _, _, cfg, seed = parse_problem_spec(spec)
    if len(dists) != 2:
        raise SchemaError("steinsanov needs two distributions")
    prob = HypothesisProblem(dists[0], dists[1], wf)
    etas = (0.2, 0.1, 0.05, 0.02) if args.eta_sweep else (args.eta,)
    try:
        limit = stein_sanov_limit(prob, cfg)
        rows = []
        for eta in etas:
            for n in args.n_list:
                est = stein_sanov_empirical(
                    ProductProblem(prob, n), eta, args.method, cfg,
                    mc_samples=args.mc_samples, mc_seed=seed)
                rows.append((eta, n, est.rate_estimate, limit,
                             abs(est.rate_estimate - limit)))
    except WinferError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    if args.eta_sweep:
        lines = ["eta,n,rate_estimate,limit,gap"]
        lines += [f"{e!r},{n},{r!r},{l!r},{g!r}" for (e, n, r, l, g) in rows]
    else:
        lines = ["n,rate_estimate,limit,gap"]
        lines += [f"{n},{r!r},{l!r},{g!r}" for (_, n, r, l, g) in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_cramer_rao(args) -> int:
    wf = WeightFunction.exponential(args.gamma)
    if args.family == "gaussian-shift":
        model = gaussian_shift_model(sigma=args.sigma)
    elif args.family == "gaussian-scale":
        model = gaussian_scale_model()
        wf = WeightFunction.exponential(args.gamma / args.theta)  # scaled weight
    else:
        raise SchemaError("family must be gaussian-shift or gaussian-scale")

    if args.estimator == "mean":
        est = mean_estimator(model, wf)
    elif args.estimator == "shifted-mean":
        est = shifted_mean_estimator(model, wf)
    elif args.estimator == "scale-abs-mean":
        est = scale_abs_mean_estimator()
    else:
        raise SchemaError("estimator must be mean, shifted-mean, or scale-abs-mean")

    cfg = IntegrationConfig()
    rows = []
    code = 0
    try:
        ra = cramer_rao_A(model, wf, args.theta, args.n, est, cfg,
                          trials=args.trials, seed=args.seed)
        rows.append({"version": "A", "lhs": ra.lhs, "lhs_stderr": ra.lhs_stderr,
                     "rhs": ra.rhs, "rhs_stderr": ra.rhs_stderr,
                     "passed_3sigma": ra.holds_3sigma, "details": ra.details})
        if est.c_prime is not None:
            rb = cramer_rao_B(model, wf, args.theta, args.n, est, cfg,
                              trials=args.trials, seed=args.seed + 1)
            rows.append({"version": "B", "lhs": rb.lhs, "lhs_stderr": rb.lhs_stderr,
                         "rhs": rb.rhs, "rhs_stderr": rb.rhs_stderr,
                         "passed_3sigma": rb.holds_3sigma, "details": rb.details})
        if args.van_trees:
            prior = PriorSpec(kind="gaussian", mean=args.theta, var=args.prior_var)
            for version in ("A", "C"):
                vt = van_trees(model, wf, args.n, est, prior, version, cfg,
                               trials=max(args.trials // 5, 20_000), seed=args.seed + 2)
                rows.append({"version": f"van-trees-{version}", "lhs": vt.lhs,
                             "lhs_stderr": vt.lhs_stderr, "rhs": vt.rhs,
                             "passed_3sigma": vt.holds_3sigma, "details": vt.details})
    except WinferError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    if any(math.isnan(r["lhs"]) or math.isnan(r["rhs"]) for r in rows):
        code = 2
    report = {
        "schema": 1,
        "tool": "winfer",
        "version": __version__,
        "seed": args.seed,
        "family": args.family,
        "estimator": args.estimator,
        "gamma": args.gamma,
        "theta": args.theta,
        "n": args.n,
        "trials": args.trials,
        "bounds": rows,
    }
    _emit_json(report, args.out, args.reproducible)
    return code


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _int_list(text: str) -> list:
    try:
        return [int(v) for v in text.split(",") if v]
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from exc


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="winfer",
                                 description="weighted information-theoretic "
                                             "distances, bounds, and experiments")
    ap.add_argument("--version", action="version", version=f"winfer {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate quantities from a problem spec")
    c.add_argument("spec")
    c.add_argument("--out")
    c.add_argument("--reproducible", action="store_true",
                   help="omit the timestamp so reruns are byte-identical")
    c.add_argument("--as-printed", action="store_true",
                   help="report the as-printed Gaussian TV closed forms "
                        "instead of the quadrature-verified ones")
    c.set_defaults(fn=cmd_compute)

    v = sub.add_parser("verify", help="run a named randomized verification suite")
    v.add_argument("--suite", required=True, choices=sorted(SUITES))
    v.add_argument("--instances", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out")
    v.add_argument("--reproducible", action="store_true")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("steinsanov", help="empirical type-II exponent sweep")
    s.add_argument("--spec", required=True)
    s.add_argument("--n-list", type=_int_list, default=[25, 50, 100, 200])
    s.add_argument("--eta", type=float, default=0.05)
    s.add_argument("--eta-sweep", action="store_true",
                   help="sweep eta over {0.2, 0.1, 0.05, 0.02} (adds an eta column)")
    s.add_argument("--method", choices=("exact", "mc"), default="exact")
    s.add_argument("--mc-samples", type=int, default=200_000)
    s.add_argument("--out")
    s.set_defaults(fn=cmd_steinsanov)

    r = sub.add_parser("cramer-rao", help="weighted Cramer-Rao / van Trees experiment")
    r.add_argument("--family", choices=("gaussian-shift", "gaussian-scale"),
                   default="gaussian-shift")
    r.add_argument("--phi-gamma", dest="gamma", type=float, default=0.5)
    r.add_argument("--estimator", choices=("mean", "shifted-mean", "scale-abs-mean"),
                   default="mean")
    r.add_argument("--n", type=int, default=5)
    r.add_argument("--trials", type=int, default=1_000_000)
    r.add_argument("--theta", type=float, default=0.0)
    r.add_argument("--sigma", type=float, default=1.0)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--van-trees", action="store_true")
    r.add_argument("--prior-var", type=float, default=1.0)
    r.add_argument("--out")
    r.add_argument("--reproducible", action="store_true")
    r.set_defaults(fn=cmd_cramer_rao)
    return ap


def main(argv=None) -> int:
    max_threads()  # validate the env var early
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except SchemaError as exc:
        sys.stderr.write(f"schema error: {exc}\n")
        return 1
    except WinferError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
