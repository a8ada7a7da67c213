"""Acceptance checks shared by ``monometric verify`` and the test suite.

Each check returns a :class:`CriterionResult`; nothing here weakens a
tolerance to make a check pass.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from . import channels as ch
from .closed_forms import (
    HyperbolicParams,
    family_membership,
    ft_alpha_zero,
    ft_cosh_product,
    ft_sech_half,
    hyperbolic_model_function,
    hyperbolic_pd_predicate,
    newext_threshold,
)
from .kernels import catalog_samples, check_class_K, custom_kernel, dual, make_kernel, make_mixture
from .linalg_core import random_density_with_condition, rng_for
from .posdef import (
    INCONCLUSIVE,
    NPD,
    PD,
    TestConfig,
    cp_test,
    critical_search,
    fourier_test,
    gram_test,
    membership,
    order_test,
)
from .superop import BKM_KERNEL, apply_omega, apply_omega_inverse, bkm_quadrature, make_handle

SUITES = ("all", "kernels", "posdef", "closed-forms", "channels")
FAULTS = ("symmetry",)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] criterion {self.number}: {self.name} ({self.seconds:.1f}s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed,
                "seconds": round(self.seconds, 3), "detail": self.detail}


def _agree(predicted, observed) -> str:
    if predicted is None:
        return "no-prediction"
    if observed is None:
        return "inconclusive-consistent"
    return "match" if predicted == observed else "contradiction"


# ---------------------------------------------------------------------------
# 1. membership table

MEMBERSHIP_TABLE = {
    "heinz": ("alpha", (0.0, 0.25, 0.5, 0.75, 1.0)),
    "binomial": ("alpha", (-1.0, -0.5, 0.0, 0.5, 1.0)),
    "power_difference": ("alpha", (-1.0, 0.0, 0.5, 1.0, 2.0)),
    "wyd": ("p", (-1.0, -0.75, -0.5, 0.0, 0.5, 1.0, 1.2, 1.5, 2.0)),
    "stolarsky": ("alpha", (-2.0, -1.5, -1.0, 0.0, 1.0, 2.0)),
    "sinh_bridge": ("alpha", (0.0, 0.5, 1.0, 1.5, 2.0)),
}


def _symmetry_fault(k):
    """A corrupted copy of ``k``: x -> k(1/x) breaks x k(x) = k(1/x)."""
    return custom_kernel(lambda x: k(1.0 / np.asarray(x, dtype=float)), f"fault[{k}]")


def membership_table(cfg: TestConfig = TestConfig(), fault: str | None = None) -> CriterionResult:
    rows = []
    invariant_failures = []
    for fam, (pname, values) in MEMBERSHIP_TABLE.items():
        for v in values:
            k = make_kernel(fam, {pname: v})
            probe = _symmetry_fault(k) if fault == "symmetry" else k
            rep = check_class_K(probe, pairs=20, seed=cfg.seed)
            if not rep.ok:
                invariant_failures.append({"kernel": str(probe), "failures": rep.failures})
                continue
            pred = family_membership(k)
            res = membership(k, cfg)
            plus = _agree(pred["in_K_plus"], res.in_K_plus)
            minus = _agree(pred["in_K_minus"], res.in_K_minus)
            rows.append({"kernel": str(k), "predicted": pred,
                         "observed": {"in_K_plus": res.in_K_plus, "in_K_minus": res.in_K_minus},
                         "plus": plus, "minus": minus})
    contradictions = [r for r in rows if "contradiction" in (r["plus"], r["minus"])]
    definite = [r for r in rows if r["plus"] in ("match", "no-prediction") and r["minus"] in ("match", "no-prediction")
                and not (r["plus"] == "no-prediction" and r["minus"] == "no-prediction")]
    total = sum(len(v) for _, v in MEMBERSHIP_TABLE.values())
    frac = len(definite) / total
    detail = {"samples": total, "definite_matches": len(definite), "definite_fraction": frac,
              "contradictions": contradictions, "invariant_failures": invariant_failures}
    if invariant_failures:
        names = sorted({f.split(":")[0] for item in invariant_failures for f in item["failures"]})
        detail["failed_invariants"] = names
    passed = not invariant_failures and not contradictions and frac >= 0.9
    return CriterionResult(1, "family membership table", passed, detail)


# ---------------------------------------------------------------------------
# 2. convex combination threshold

def convex_threshold(cfg: TestConfig = TestConfig()) -> CriterionResult:
    rows = []
    ok = True
    for nu in (0.1, 0.25, 0.5, 0.75):
        res = critical_search(lambda lam, nu=nu: make_kernel("convex_combo", nu=nu, lam=lam), (0.1, 0.9), cfg)
        exact = newext_threshold(nu)
        err = abs(res.estimate - exact)
        good = res.converged and err <= 5e-3
        ok &= good
        rows.append({"nu": nu, "estimate": res.estimate, "bracket": [res.positive_end, res.negative_end],
                     "exact": exact, "error": err, "ok": good})
    return CriterionResult(2, "convex combination threshold", ok, {"rows": rows})


# ---------------------------------------------------------------------------
# 3. geometric bridge bounds

def bridge_bounds(cfg: TestConfig = TestConfig()) -> CriterionResult:
    rows = []
    ok = True
    for nu in (0.3, 0.5, 0.7):
        fam = lambda lam, nu=nu: make_kernel("geometric_bridge", mu=1.0, nu=nu, lam=lam)
        lo = cp_test(fam(0.24), cfg).verdict
        hi = cp_test(fam(0.345), cfg).verdict
        res = critical_search(fam, (0.24, 0.345), cfg)
        inside = 0.23 <= min(res.positive_end, res.negative_end) and max(res.positive_end, res.negative_end) <= 0.345
        good = lo == PD and hi == NPD and inside
        ok &= good
        rows.append({"nu": nu, "verdict_0.24": lo, "verdict_0.345": hi,
                     "bracket": [res.positive_end, res.negative_end], "estimate": res.estimate, "ok": good})
    res0 = critical_search(lambda lam: make_kernel("geometric_bridge", mu=1.0, nu=0.0, lam=lam), (0.3, 0.7), cfg)
    good0 = res0.converged and abs(res0.estimate - 0.5) <= 5e-3
    ok &= good0
    rows.append({"nu": 0.0, "estimate": res0.estimate, "bracket": [res0.positive_end, res0.negative_end], "ok": good0})
    return CriterionResult(3, "geometric bridge bounds", ok, {"rows": rows})


# ---------------------------------------------------------------------------
# 4. closed-form Fourier transforms

FT_CUTOFF = 80.0  # the model integrands are below 1e-50 beyond this point


def _quad_ft(f: Callable[[float], float], s: float) -> float:
    """Integral of e^{ist} f(t) over the real line for even f, by adaptive quadrature."""
    val, _ = quad(f, 0.0, FT_CUTOFF, weight="cos", wvar=abs(s), epsabs=1e-14, epsrel=1e-12, limit=500)
    return 2.0 * val


def fourier_closed_forms(cfg: TestConfig = TestConfig()) -> CriterionResult:
    grid = np.arange(-8.0, 8.0 + 1e-12, 0.25)
    rows = []
    ok = True
    for a, b in ((-0.5, 2.0), (0.0, 3.0), (0.9, 1.5)):
        p = HyperbolicParams(a, b)
        f = lambda t, a=a, b=b: 1.0 / ((math.cosh(0.5 * t) + a) * (math.cosh(t) + b))
        ref = np.array([_quad_ft(f, s) for s in grid])
        err = float(np.max(np.abs(ft_cosh_product(p, grid) - ref)))
        row = {"alpha": a, "beta": b, "ft_cosh_product_err": err}
        good = err <= 1e-7
        if a == 0.0:
            err0 = float(np.max(np.abs(ft_alpha_zero(b, grid) - ref)))
            row["ft_alpha_zero_err"] = err0
            good &= err0 <= 1e-7
        row["ok"] = good
        ok &= good
        rows.append(row)
    sech_err = float(np.max(np.abs(ft_sech_half(grid) - 2.0 * math.pi / np.cosh(math.pi * grid))))
    ok &= sech_err <= 1e-8
    return CriterionResult(4, "closed-form Fourier transforms", ok, {"rows": rows, "sech_half_err": sech_err})


# ---------------------------------------------------------------------------
# 5. predicates vs engine

PREDICATE_CASES = (
    ("cosh_power_product", {"k": 1, "m": 1, "beta": 2.0}, False),
    ("cosh_power_product", {"k": 2, "m": 1, "beta": 2.0}, False),
    ("cosh_power_product", {"k": 1, "m": 2, "beta": 2.0}, True),
    ("cosh_power_product", {"k": 2, "m": 3, "beta": 1.5}, False),
    ("sinh_ratio", {"a": 0.5, "b": 0.7}, False),
    ("sinh_ratio", {"a": 1.2, "b": 0.5}, True),
    ("sinh_ratio", {"a": 1.5, "b": 0.6}, False),
    ("cosh_beta", {"beta": 0.5}, False),
    ("cosh_beta", {"beta": 1.0}, False),
    ("cosh_beta", {"beta": 2.0}, True),
)


def _engine_verdict(f, cfg: TestConfig) -> str:
    v = fourier_test(f, cfg)
    if v.verdict == INCONCLUSIVE:
        g = gram_test(f, cfg)
        if g.verdict == NPD:
            return NPD
    return v.verdict


def predicates_vs_engine(cfg: TestConfig = TestConfig()) -> CriterionResult:
    rows = []
    ok = True
    for kind, params, must_refute in PREDICATE_CASES:
        pred = hyperbolic_pd_predicate(kind, **params)["pd"]
        verdict = _engine_verdict(hyperbolic_model_function(kind, **params), cfg)
        observed = True if verdict == PD else (False if verdict == NPD else None)
        agree = _agree(pred, observed)
        good = agree != "contradiction" and not (must_refute and verdict != NPD)
        ok &= good
        rows.append({"kind": kind, "params": params, "predicted_pd": pred, "verdict": verdict,
                     "agreement": agree, "ok": good})
    return CriterionResult(5, "exact predicates vs engine", ok, {"rows": rows})


# ---------------------------------------------------------------------------
# 6. superoperator identities

def _random_hermitian(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (g + g.conj().T)


def superop_identities(cfg: TestConfig = TestConfig(), cases: int = 100) -> CriterionResult:
    kernels = catalog_samples()
    rng = rng_for("acceptance_superop", cfg.seed)
    worst = {"roundtrip": 0.0, "duality": 0.0, "hermiticity": 0.0, "metric_min": math.inf}
    for i in range(cases):
        k = kernels[i % len(kernels)]
        d = int(rng.integers(1, 7))
        base = random_density_with_condition(rng, d, float(10 ** rng.uniform(0, 3)))
        x = _random_hermitian(rng, d)
        h = make_handle(k, base)
        nx = np.linalg.norm(x)
        y = apply_omega(h, x)
        back = apply_omega(h, apply_omega_inverse(h, x))
        worst["roundtrip"] = max(worst["roundtrip"], float(np.linalg.norm(back - x) / nx))
        inv_base = np.linalg.inv(base)
        other = make_handle(dual(k), 0.5 * (inv_base + inv_base.conj().T))
        dres = np.linalg.norm(apply_omega_inverse(h, x) - other.apply(x)) / nx
        worst["duality"] = max(worst["duality"], float(dres))
        worst["hermiticity"] = max(worst["hermiticity"], float(np.max(np.abs(y - y.conj().T))))
        worst["metric_min"] = min(worst["metric_min"], float(np.vdot(x, y).real))
    ok = (worst["roundtrip"] <= 1e-10 and worst["duality"] <= 1e-10
          and worst["hermiticity"] <= 1e-12 and worst["metric_min"] >= -1e-12)
    return CriterionResult(6, "superoperator identities", ok, {"cases": cases, "worst": worst})


# ---------------------------------------------------------------------------
# 7. BKM cross-validation

def bkm_cross_validation(cfg: TestConfig = TestConfig(), cases: int = 30) -> CriterionResult:
    rng = rng_for("acceptance_bkm", cfg.seed)
    worst_f = worst_i = 0.0
    for i in range(cases):
        d = 2 + i % 5
        cond = float(10 ** rng.uniform(0, 4))
        base = random_density_with_condition(rng, d, cond)
        x = _random_hermitian(rng, d)
        h = make_handle(BKM_KERNEL, base)
        fwd = h.apply(x)
        inv = h.apply_inverse(x)
        worst_f = max(worst_f, float(np.linalg.norm(bkm_quadrature("forward", base, x) - fwd) / np.linalg.norm(fwd)))
        worst_i = max(worst_i, float(np.linalg.norm(bkm_quadrature("inverse", base, x) - inv) / np.linalg.norm(inv)))
    ok = worst_f <= 1e-6 and worst_i <= 1e-6
    return CriterionResult(7, "BKM cross-validation", ok,
                           {"cases": cases, "forward_rel_err": worst_f, "inverse_rel_err": worst_i})


# ---------------------------------------------------------------------------
# 8. metric monotonicity under channels

AUDIT_KERNELS = (
    ("extreme", {"nu": 0.3}),
    ("heinz", {"alpha": 0.2}),
    ("binomial", {"alpha": -0.5}),
    ("power_difference", {"alpha": 2.0}),
    ("wyd", {"p": 1.5}),
    ("stolarsky", {"alpha": -2.0}),
    ("sinh_bridge", {"alpha": 1.5}),
    ("heron", {"nu": 0.5, "lam": 0.5}),
)


def metric_monotonicity(cfg: TestConfig = TestConfig(), samples: int = 1000) -> CriterionResult:
    kernels = [make_kernel(f, p) for f, p in AUDIT_KERNELS]
    kernels.append(make_mixture([(0.5, make_kernel("extreme", nu=1.0)), (0.5, make_kernel("wyd", p=-1.0))]))
    rng = rng_for("acceptance_monotonicity", cfg.seed)
    violations = []
    worst = -math.inf
    regularized = 0
    for i in range(samples):
        d = (2, 3, 4)[i % 3]
        env = int(rng.integers(1, d * d + 1))
        phi = ch.random_channel(d, env, int(rng.integers(0, 2**31)))
        rho = random_density_with_condition(rng, d, float(10 ** rng.uniform(0, 3)))
        x = _random_hermitian(rng, d)
        x = x - np.trace(x).real / d * np.eye(d)
        for k in kernels:
            a = ch.contraction_audit(k, phi, rho, x)
            regularized += a["regularized"]
            worst = max(worst, (a["lhs"] - a["rhs"]) / a["rhs"])
            if not a["ok"]:
                violations.append({"sample": i, "kernel": str(k), "lhs": a["lhs"], "rhs": a["rhs"]})
    return CriterionResult(8, "metric monotonicity", not violations,
                           {"samples": samples, "kernels": len(kernels), "violations": violations[:10],
                            "worst_relative_excess": worst, "regularized": regularized})


# ---------------------------------------------------------------------------
# 9. contraction coefficients

HEINZ_ALPHAS = (0.0, 0.25, 0.5)


def contraction_coefficients(cfg: TestConfig = TestConfig(), channels_count: int = 20,
                             samples: int = 10, starts: int = 50) -> CriterionResult:
    sqrt_k = make_kernel("heinz", alpha=0.5)
    heinz = [make_kernel("heinz", alpha=a) for a in HEINZ_ALPHAS]
    ok = True
    trivial = {}
    for name, phi, target in (("identity", ch.identity_channel(3), 1.0), ("depolarizing", ch.depolarizing_channel(3), 0.0)):
        est = ch.eta_estimates(sqrt_k, phi, samples, cfg.seed, starts)
        good = all(abs(v - target) <= 1e-8 for v in est.values())
        ok &= good
        trivial[name] = {**est, "ok": good}
    rows = []
    for i in range(channels_count):
        env = 2 + i % 8
        phi = ch.random_channel(3, env, cfg.seed + i)
        dob, pair = ch.dobrushin_search(phi, starts, cfg.seed + i)
        relent = ch.eta_relent_lower(sqrt_k, phi, samples, cfg.seed + i)
        riem = [ch.eta_riem_sup(k, phi, samples, cfg.seed + i, pair) for k in heinz]
        good = (max(riem) <= 1 + 1e-8 and relent <= dob + 2e-2
                and all(dob <= math.sqrt(r) + 2e-2 for r in riem))
        ok &= good
        rows.append({"env": env, "eta_dob_lower": dob, "eta_relent_lower": relent,
                     "eta_riem_sup": dict(zip(map(str, HEINZ_ALPHAS), riem)), "ok": good})
    return CriterionResult(9, "contraction coefficients", ok, {"trivial": trivial, "random": rows})


# ---------------------------------------------------------------------------
# 10. order relation

def order_chains() -> list[tuple[str, object, object, bool]]:
    """(label, k1, k2, expected) for 'k1 precedes k2'."""
    ext = lambda nu: make_kernel("extreme", nu=nu)
    heinz = lambda a: make_kernel("heinz", alpha=a)
    binom = lambda a: make_kernel("binomial", alpha=a)
    pdiff = lambda a: make_kernel("power_difference", alpha=a)
    out = [
        ("2/(1+x) <= x^-1/2", ext(1.0), heinz(0.5), True),
        ("x^-1/2 <= (1+x)/2x", heinz(0.5), ext(0.0), True),
    ]
    for a, b in ((0.0, 0.2), (0.2, 0.4), (0.4, 0.5)):
        out.append((f"heinz {a} <= heinz {b}", heinz(a), heinz(b), True))
    for a, b in ((1.0, 0.5), (0.5, 0.0), (0.0, -0.5)):
        out.append((f"binomial {a} <= binomial {b}", binom(a), binom(b), True))
    for a, b in ((2.0, 1.5), (1.5, 0.5), (0.5, -0.5)):
        out.append((f"power_difference {a} <= power_difference {b}", pdiff(a), pdiff(b), True))
    out.append(("extreme 0.5 not<= (1+x)/2x", ext(0.5), ext(0.0), False))
    out.append(("2/(1+x) not<= dual extreme 0.5", ext(1.0), dual(ext(0.5)), False))
    return out


def order_relation(cfg: TestConfig = TestConfig()) -> CriterionResult:
    rows = []
    ok = True
    for label, k1, k2, expected in order_chains():
        v = order_test(k1, k2, cfg)
        if expected:
            good = v.verdict in (PD, INCONCLUSIVE)
        else:
            good = v.verdict == NPD
        ok &= good
        rows.append({"pair": label, "expected": expected, "verdict": v.verdict, "margin": v.margin, "ok": good})
    return CriterionResult(10, "order relation", ok, {"rows": rows})


# ---------------------------------------------------------------------------

CRITERIA = {
    1: ("kernels", membership_table),
    2: ("posdef", convex_threshold),
    3: ("posdef", bridge_bounds),
    4: ("closed-forms", fourier_closed_forms),
    5: ("closed-forms", predicates_vs_engine),
    6: ("kernels", superop_identities),
    7: ("kernels", bkm_cross_validation),
    8: ("channels", metric_monotonicity),
    9: ("channels", contraction_coefficients),
    10: ("posdef", order_relation),
}


def run_criterion(number: int, cfg: TestConfig = TestConfig(), fault: str | None = None) -> CriterionResult:
    _, fn = CRITERIA[number]
    t0 = time.perf_counter()
    res = fn(cfg, fault=fault) if number == 1 else fn(cfg)
    res.seconds = time.perf_counter() - t0
    return res


def run_suite(suite: str = "all", cfg: TestConfig = TestConfig(), fault: str | None = None,
              progress: Callable[[CriterionResult], None] | None = None) -> list[CriterionResult]:
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
    if fault is not None and fault not in FAULTS:
        raise ValueError(f"unknown fault {fault!r}; choose from {FAULTS}")
    out = []
    for number, (tag, _) in CRITERIA.items():
        if suite != "all" and tag != suite:
            continue
        res = run_criterion(number, cfg, fault)
        if progress is not None:
            progress(res)
        out.append(res)
    return out
