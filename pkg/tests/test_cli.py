"""CLI surface: schema validation, exit codes, determinism, file formats."""

import json
import math
import subprocess
import sys

import pytest

from winfer.cli import compute_report, parse_problem_spec
from winfer.errors import SchemaError


def spec_binary(quantities, weight=None, alpha_grid=None):
    spec = {
        "schema": 1,
        "seed": 5,
        "distributions": [{"pmf": [0.5, 0.5]}, {"pmf": [0.25, 0.75]}],
        "weight": weight or {"kind": "table", "values": [2.0, 1.0]},
        "quantities": quantities,
    }
    if alpha_grid:
        spec["alpha_grid"] = alpha_grid
    return spec


def spec_gaussian_abs():
    return {
        "schema": 1,
        "seed": 11,
        "distributions": [
            {"family": "gaussian-scalar", "params": {"mu": 0.0, "sigma2": 1.0}},
            {"family": "gaussian-scalar", "params": {"mu": 2.0, "sigma2": 1.0}},
        ],
        "weight": {"kind": "absolute"},
        "quantities": ["tv"],
    }


def run_cli(args, spec=None, tmp_path=None):
    cmd = [sys.executable, "-m", "winfer.cli"] + args
    if spec is not None:
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(spec))
        cmd = [c if c != "SPEC" else str(path) for c in cmd]
    return subprocess.run(cmd, capture_output=True, text=True)


class TestSchema:
    def test_missing_distributions(self):
        with pytest.raises(SchemaError):
            parse_problem_spec({"schema": 1, "weight": {"kind": "absolute"},
                                "quantities": ["tv"]})

    def test_unknown_quantity(self):
        with pytest.raises(SchemaError):
            parse_problem_spec(spec_binary(["entropy-rate"]))

    def test_unknown_family(self):
        spec = spec_binary(["tv"])
        spec["distributions"][0] = {"family": "cauchy", "params": {}}
        with pytest.raises(SchemaError):
            parse_problem_spec(spec)

    def test_denormalized_pmf(self):
        spec = spec_binary(["tv"])
        spec["distributions"][0] = {"pmf": [0.5, 0.6]}
        with pytest.raises(SchemaError):
            parse_problem_spec(spec)

    def test_bad_alpha(self):
        with pytest.raises(SchemaError):
            parse_problem_spec(spec_binary(["kl"], alpha_grid=[1.5]))

    def test_integration_overrides(self):
        spec = spec_binary(["tv"])
        spec["integration"] = {"rel_tol": 1e-8, "abs_tol": 1e-10}
        parse_problem_spec(spec)
        spec["integration"] = {"bogus": 1}
        with pytest.raises(SchemaError):
            parse_problem_spec(spec)


class TestComputeReport:
    def test_identical_distributions_all_zero(self):
        spec = {
            "schema": 1,
            "distributions": [{"pmf": [0.4, 0.6]}, {"pmf": [0.4, 0.6]}],
            "weight": {"kind": "table", "values": [2.0, 1.0]},
            "quantities": ["tv", "kl", "hellinger", "chernoff-div",
                           "renyi-div", "tsallis-div", "bhattacharyya-div"],
            "alpha_grid": [0.5],
        }
        report, code = compute_report(spec)
        assert code == 0
        for rec in report["quantities"]:
            assert rec["value"] == pytest.approx(0.0, abs=1e-12), rec["name"]

    def test_gaussian_absolute_tv_record(self):
        report, code = compute_report(spec_gaussian_abs())
        assert code == 0
        (rec,) = report["quantities"]
        # quadrature-verified weighted TV; the widely printed closed form
        # (= 1.682689, the one-sided supremum) is reproduced under --as-printed
        assert rec["value"] == pytest.approx(1.0731410699216889, rel=1e-9)
        assert rec["closed_form"]["value"] == pytest.approx(rec["value"], rel=1e-9)
        report_p, _ = compute_report(spec_gaussian_abs(), as_printed=True)
        assert report_p["quantities"][0]["closed_form"]["value"] == \
            pytest.approx(1.6826894921370859, rel=1e-12)

    def test_dual_method_kl_record(self):
        spec = {
            "schema": 1,
            "distributions": [
                {"family": "exponential", "params": {"lam": 2.0}},
                {"family": "exponential", "params": {"lam": 3.0}},
            ],
            "weight": {"kind": "exponential", "gamma": 0.5},
            "quantities": ["kl"],
        }
        report, code = compute_report(spec)
        assert code == 0
        (rec,) = report["quantities"]
        assert rec["method"] == "quadrature"
        assert rec["value"] == pytest.approx(0.3482687447446695, rel=1e-9)
        assert rec["closed_form"]["value"] == pytest.approx(rec["value"], rel=1e-9)

    def test_quantities_appear_exactly_once(self):
        spec = spec_binary(["tv", "kl", "renyi-div"], alpha_grid=[0.3, 0.7])
        report, _ = compute_report(spec)
        names = [r["name"] for r in report["quantities"]]
        assert len(names) == len(set(names))
        assert "renyi-div@0.3" in names and "renyi-div@0.7" in names

    def test_error_bounds_checks_emitted(self):
        report, code = compute_report(spec_binary(["error-bounds"]))
        assert code == 0
        assert report["bound_checks"]
        assert all(c["passed"] for c in report["bound_checks"])

    def test_numerical_failure_partial_report(self):
        spec = {
            "schema": 1,
            "distributions": [{"pmf": [0.5, 0.5]}, {"pmf": [1.0, 0.0]}],
            "weight": {"kind": "constant", "c": 1.0},
            "quantities": ["tv", "stein-sanov-limit"],
        }
        report, code = compute_report(spec)
        assert code == 2
        names = {r["name"]: r for r in report["quantities"]}
        assert "value" in names["tv"]
        assert "error" in names["stein-sanov-limit"]


class TestSubprocessContracts:
    def test_compute_exit_codes(self, tmp_path):
        r = run_cli(["compute", "SPEC", "--reproducible"],
                    spec=spec_gaussian_abs(), tmp_path=tmp_path)
        assert r.returncode == 0
        json.loads(r.stdout)
        missing = run_cli(["compute", str(tmp_path / "nope.json")])
        assert missing.returncode == 1

    def test_schema_error_exit_one(self, tmp_path):
        bad = {"schema": 1, "distributions": [], "weight": {"kind": "absolute"},
               "quantities": ["tv"]}
        r = run_cli(["compute", "SPEC"], spec=bad, tmp_path=tmp_path)
        assert r.returncode == 1
        assert "schema error" in r.stderr

    def test_compute_determinism(self, tmp_path):
        a = run_cli(["compute", "SPEC", "--reproducible"],
                    spec=spec_binary(["tv", "kl", "error-bounds"]),
                    tmp_path=tmp_path)
        b = run_cli(["compute", "SPEC", "--reproducible"],
                    spec=spec_binary(["tv", "kl", "error-bounds"]),
                    tmp_path=tmp_path)
        assert a.returncode == b.returncode == 0
        assert a.stdout == b.stdout and a.stdout

    def test_verify_determinism_and_exit(self, tmp_path):
        args = ["verify", "--suite", "tv-oracle", "--instances", "40",
                "--seed", "3", "--reproducible"]
        a, b = run_cli(args), run_cli(args)
        assert a.returncode == 0 and a.stdout == b.stdout
        rep = json.loads(a.stdout)
        assert rep["report"]["passed"] is True

    def test_verify_unknown_suite(self):
        r = run_cli(["verify", "--suite", "everything"])
        assert r.returncode != 0

    def test_steinsanov_csv(self, tmp_path):
        spec = spec_binary(["stein-sanov-limit"])
        r = run_cli(["steinsanov", "--spec", "SPEC", "--n-list", "25,50",
                     "--eta", "0.1", "--method", "exact"],
                    spec=spec, tmp_path=tmp_path)
        assert r.returncode == 0
        lines = r.stdout.strip().splitlines()
        assert lines[0] == "n,rate_estimate,limit,gap"
        assert len(lines) == 3
        n, rate, limit, gap = lines[1].split(",")
        assert int(n) == 25
        assert abs(float(rate) - float(limit)) == pytest.approx(float(gap))

    def test_steinsanov_identical_rates_equal_log_mass(self, tmp_path):
        spec = {
            "schema": 1,
            "distributions": [{"pmf": [0.5, 0.5]}, {"pmf": [0.5, 0.5]}],
            "weight": {"kind": "table", "values": [2.0, 1.0]},
            "quantities": ["stein-sanov-limit"],
        }
        r = run_cli(["steinsanov", "--spec", "SPEC", "--n-list", "25,50"],
                    spec=spec, tmp_path=tmp_path)
        assert r.returncode == 0
        for line in r.stdout.strip().splitlines()[1:]:
            rate = float(line.split(",")[1])
            assert rate == pytest.approx(math.log(1.5), abs=1e-12)

    def test_steinsanov_infinite_kl_exit_two(self, tmp_path):
        spec = {
            "schema": 1,
            "distributions": [{"pmf": [0.5, 0.5]}, {"pmf": [1.0, 0.0]}],
            "weight": {"kind": "constant", "c": 1.0},
            "quantities": ["stein-sanov-limit"],
        }
        r = run_cli(["steinsanov", "--spec", "SPEC"], spec=spec, tmp_path=tmp_path)
        assert r.returncode == 2

    def test_cramer_rao_smoke(self):
        r = run_cli(["cramer-rao", "--family", "gaussian-shift", "--phi-gamma",
                     "0.5", "--estimator", "mean", "--n", "5", "--trials",
                     "50000", "--seed", "1", "--reproducible"])
        assert r.returncode == 0
        rep = json.loads(r.stdout)
        versions = {row["version"]: row for row in rep["bounds"]}
        assert versions["A"]["passed_3sigma"] is True
        assert versions["B"]["passed_3sigma"] is True

    def test_cramer_rao_scale_family_wiring(self):
        r = run_cli(["cramer-rao", "--family", "gaussian-scale", "--phi-gamma",
                     "0.4", "--estimator", "scale-abs-mean", "--theta", "1.0",
                     "--n", "6", "--trials", "40000", "--seed", "12",
                     "--reproducible"])
        assert r.returncode == 0
        rep = json.loads(r.stdout)
        (row,) = rep["bounds"]  # no analytic sqrt-weight bias: version A only
        assert row["version"] == "A"
        assert row["lhs"] > 0 and row["rhs"] > 0

    def test_threads_env_validated(self, tmp_path):
        import os
        env = dict(os.environ, WINFER_THREADS="three")
        r = subprocess.run([sys.executable, "-m", "winfer.cli", "verify",
                            "--suite", "tv-oracle", "--instances", "2"],
                           capture_output=True, text=True, env=env)
        assert r.returncode == 1
