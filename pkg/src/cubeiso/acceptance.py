"""The ten end-to-end acceptance checks, runnable from the CLI and from pytest."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np

from . import appendix_partitions as ap
from . import boolean_fourier as bf
from . import certificates as cert
from .cube_core import CubeSet, Side, batch_profiles, edge_boundary, is_subcube, moment, subcube
from .extremal_search import min_moment, min_partition_functional
from .harper import harper_min

SEED = 20240917
EXACT_TOL = 1e-12


@dataclass
class CheckResult:
    number: int
    name: str
    passed: bool
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.name}"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "details": self.details}


def check_harper() -> CheckResult:
    mismatches = []
    for n in range(1, 5):
        for m in range((1 << n) + 1):
            res = min_moment(n, m, 1.0)
            exact = edge_boundary(res.witnesses[0])
            formula = harper_min(n, m).numerator
            if exact != formula or res.min_value * (1 << n) != formula:
                mismatches.append([n, m, exact, formula])
    return CheckResult(1, "Harper agreement", not mismatches, {"mismatches": mismatches})


def check_subcube_equality() -> CheckResult:
    worst = 0.0
    for n in range(1, 11):
        for k in range(n + 1):
            target = 2.0**-k * k**cert.BETA0 if k else 0.0
            worst = max(worst, abs(moment(subcube(n, k), cert.BETA0).value - target))
    search = []
    for n in range(1, 5):
        for k in range(n + 1):
            res = min_moment(n, 1 << (n - k), cert.BETA0)
            target = 2.0**-k * k**cert.BETA0 if k else 0.0
            search.append({"n": n, "k": k, "gap": abs(res.min_value - target), "subcube_witness": res.witness_is_subcube})
    ok = worst <= EXACT_TOL and all(r["gap"] <= EXACT_TOL and r["subcube_witness"] for r in search)
    return CheckResult(2, "subcube equality cases", ok, {"max_formula_error": worst, "search": search})


def _exact_subcube_moment(k: int) -> Fraction:
    """``2^-k k^beta0`` for ``k`` a power of two, where ``k^beta0 = (3/2)^log2(k)``."""
    return Fraction(3, 2) ** (k.bit_length() - 1) / 2**k


def check_sharp_constant() -> CheckResult:
    rows = []
    for k in (1, 2):
        mu = Fraction(1, 2**k)
        exact = _exact_subcube_moment(k)
        target = 2 * mu * (1 - mu)
        value = moment(subcube(6, k), cert.BETA0).value
        rows.append({"k": k, "exact": str(exact), "target": str(target), "float": value, "float_error": abs(value - float(target))})
    ok = all(Fraction(r["exact"]) == Fraction(r["target"]) and r["float_error"] <= 1e-15 for r in rows)
    return CheckResult(3, "sharp constant 2 at codim-1 and codim-2 subcubes", ok, {"rows": rows})


def check_certificates(resolutions=(256, 1024)) -> CheckResult:
    reports = cert.certificate_suite(resolutions)
    negative = cert.certify_grid(cert.Quadratic(2.0), 0.5, 1024, "full_triangle")
    counter = cert.quadratic_counterexample(0.5, 2.0)
    ok = all(r.passed for r in reports) and negative.violation and counter["fails"]
    return CheckResult(
        4,
        "two-point certificates and negative control",
        ok,
        {
            "reports": [r.to_dict() for r in reports],
            "negative_control": negative.to_dict(),
            "set_counterexample": counter,
        },
    )


def check_constants() -> CheckResult:
    table = cert.reference_constants()
    ok = all(v["match"] for v in table["printed"].values()) and all(table["comparisons"].values())
    return CheckResult(5, "constants to printed digits", ok, table)


def check_polynomials() -> CheckResult:
    report = cert.proof_polynomials_report()
    return CheckResult(6, "proof polynomial facts", report["passed"], report)


SWEEPS = (
    ("classical", None),
    ("log_sharp", None),
    ("log_holder", None),
    ("vertex_boundary", None),
    ("quadratic", 0.5),
    ("quadratic", cert.BETA0),
    ("cubic", None),
    ("large_measure_quadratic", None),
)


def check_theorem_sweeps() -> CheckResult:
    rows = []
    for n in range(1, 5):
        masks = np.arange(1 << (1 << n), dtype=np.uint64)
        for theorem, beta in SWEEPS:
            margins = cert.theorem_margins(n, masks, theorem, beta)
            rows.append({"n": n, "theorem": theorem, "beta": beta, "min_margin": float(np.nanmin(margins)), "sets": int(np.sum(~np.isnan(margins)))})
    ok = all(r["min_margin"] >= -EXACT_TOL for r in rows)
    return CheckResult(7, "set-level inequalities on every set with n <= 4", ok, {"rows": rows})


def check_two_sided() -> CheckResult:
    rows = []
    for n in range(1, 5):
        res = min_moment(n, 1 << (n - 1), cert.CUBIC_BETA, Side.W)
        half_witness = any(is_subcube(w) for w in res.witnesses)
        value, part = min_partition_functional(n, cert.CUBIC_BETA, 1.0)
        rows.append(
            {
                "n": n,
                "min_two_sided": res.min_value,
                "half_cube_witness": half_witness,
                "partition_min": value,
                "partition_witness_half_cube": is_subcube(part.a) and part.w.cardinality == 0,
            }
        )
    ok = all(
        abs(r["min_two_sided"] - 1) <= EXACT_TOL
        and r["half_cube_witness"]
        and r["partition_min"] >= 2 ** (r["n"] - 1) - EXACT_TOL
        and abs(r["partition_min"] - 2 ** (r["n"] - 1)) <= EXACT_TOL
        and r["partition_witness_half_cube"]
        for r in rows
    )
    return CheckResult(8, "two-sided boundary and partitions", ok, {"rows": rows})


def check_fourier() -> CheckResult:
    rng = np.random.default_rng(SEED)
    details: dict = {}
    worst_parseval = worst_round = 0.0
    for n in range(1, 11):
        f = rng.normal(size=1 << n)
        c = bf.walsh_transform(f)
        worst_parseval = max(worst_parseval, abs(math.fsum((c**2).tolist()) - math.fsum((f**2).tolist()) / f.size))
        worst_round = max(worst_round, float(np.max(np.abs(bf.inverse_walsh(c) - f))))
    details["parseval_error"] = worst_parseval
    details["round_trip_error"] = worst_round

    gradient_ok = True
    for n in range(1, 5):
        masks = np.arange(1 << (1 << n), dtype=np.uint64)
        h_rows = batch_profiles(n, masks, Side.H)
        w_rows = batch_profiles(n, masks, Side.W)
        for mask, h_row, w_row in zip(masks.tolist(), h_rows, w_rows):
            grad2, mono2 = bf.gradient_squares(bf.indicator(CubeSet(n, mask)))
            gradient_ok &= bool(np.array_equal(4 * mono2, h_row) and np.array_equal(4 * grad2, w_row))
    details["indicator_gradients_exact"] = gradient_ok

    semigroup = 0.0
    for n in range(1, 7):
        f = rng.normal(size=1 << n)
        for t in (0.1, 0.5, 1.0):
            semigroup = max(semigroup, bf.check_semigroup_identity(f, t))
    details["semigroup_max_error"] = semigroup

    hyper = {}
    for name in bf.STANDARD_CORPUS:
        for t in (0.1, 1.0):
            hyper[f"{name}@t={t}"] = bf.noise_stability_suite(bf.corpus(name), 1.0, 2.0, t)["hypercontractive_ratio"]
    details["hypercontractive_ratios"] = hyper

    fb = {name: bf.fbound_ratio(bf.corpus(name), 1.0).to_dict() for name in ("dictator4", "parity4", "parity7", "maj3")}
    details["fbound"] = fb
    w_maj3 = bf.spectral_stats(bf.majority(3)).W
    details["W_maj3"] = w_maj3

    ok = (
        worst_parseval <= EXACT_TOL
        and worst_round <= EXACT_TOL
        and gradient_ok
        and semigroup < 1e-9
        and all(r <= 1 + 1e-9 for r in hyper.values())
        and all(fb[k]["ratio"] == 1.0 for k in ("dictator4", "parity4", "parity7"))
        and abs(w_maj3 - 0.75) <= EXACT_TOL
    )
    return CheckResult(9, "Fourier identities", ok, details)


def check_appendix() -> CheckResult:
    closed = {n: abs(ap.ball_moment_closed_form(n, 0.4).value - ap.ball_moment_direct(n, 0.4)) for n in range(2, 13, 2)}
    closed_more = max(
        abs(ap.ball_moment_closed_form(n, b).value - ap.ball_moment_direct(n, b)) for n in range(2, 13, 2) for b in (0.0, 0.25, 0.5, 1.0)
    )
    halves = all(ap.half_ball_measure(n) == Fraction(1, 2) for n in range(1, 26, 2))
    v4 = ap.ball_moment_closed_form(4, 0.4).value
    v24 = ap.ball_moment_closed_form(24, 0.4).value
    table = ap.decay_table(0.4)
    details = {
        "closed_form_errors": {str(k): v for k, v in closed.items()},
        "closed_form_error_other_betas": closed_more,
        "half_ball_measure_exact": halves,
        "value_n4": v4,
        "value_n24": v24,
        "decay_threshold": ap.decay_threshold(table),
    }
    ok = max(closed.values()) <= EXACT_TOL and closed_more <= EXACT_TOL and halves and v24 < v4
    return CheckResult(10, "Hamming-ball appendix computations", ok, details)


CHECKS: tuple[Callable[[], CheckResult], ...] = (
    check_harper,
    check_subcube_equality,
    check_sharp_constant,
    check_certificates,
    check_constants,
    check_polynomials,
    check_theorem_sweeps,
    check_two_sided,
    check_fourier,
    check_appendix,
)


def run_all(echo: Callable[[str], None] | None = None) -> list[CheckResult]:
    results = []
    for check in CHECKS:
        res = check()
        if echo is not None:
            echo(res.line())
        results.append(res)
    return results

