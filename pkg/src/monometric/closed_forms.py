"""Exact Fourier transforms, Levy densities, thresholds and membership predicates.

These evaluators are used directly and as oracles for the numerical
positive-definiteness engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .kernels import MetricKernel, logcosh, logsinhc

UNKNOWN = None  # third truth value for open regions


@dataclass(frozen=True)
class HyperbolicParams:
    """Parameters of 1/((cosh(t/2) + alpha)(cosh t + beta)).

    ``theta = arccos(alpha)`` and, for ``beta > 1``, ``lam = arccosh(beta)``.
    """

    alpha: float
    beta: float

    def __post_init__(self):
        if not (-1.0 < self.alpha <= 1.0):
            raise ValueError(f"alpha={self.alpha} outside (-1, 1]")
        if not (self.beta > -1.0):
            raise ValueError(f"beta={self.beta} must exceed -1")

    @property
    def theta(self) -> float:
        return math.acos(self.alpha)

    @property
    def lam(self) -> float:
        if self.beta <= 1.0:
            raise ValueError("lam is defined only for beta > 1")
        return math.log(self.beta + math.sqrt(self.beta**2 - 1.0))


def _sinc_ratio(a: float, b: float, s):
    """sinh(a s) / sinh(b s) * (b / a), via log(sinh(y)/y); equals 1 at s = 0."""
    return np.exp(logsinhc(a * s) - logsinhc(b * s))


def ft_cosh_product(p: HyperbolicParams, s):
    """Integral of e^{ist} / ((cosh(t/2) + alpha)(cosh t + beta)) over the real line.

    Evaluated in the split form
    4 pi [F0 sinh(2 theta s)/sinh(2 pi s) - Fc cos(lam s)/(2 cosh(pi s))
          + Fs sin(lam s)/(2 sinh(pi s))],
    where every ratio is written through log(sinh(y)/y) so that s = 0 and
    alpha = 1 need no special branches.
    """
    if p.beta <= 1.0:
        raise ValueError("ft_cosh_product requires beta > 1")
    s = np.asarray(s, dtype=float)
    a, b = p.alpha, p.beta
    theta, lam = p.theta, p.lam
    root = math.sqrt(b * b - 1.0)
    denom = (b - 1.0) / 2.0 + a * a
    # sinh(2 theta s) / (sqrt(1-a^2) sinh(2 pi s)) = theta/(pi sin theta) * ratio
    theta_over_sin = 1.0 if theta == 0.0 else theta / math.sin(theta)
    first = theta_over_sin / math.pi * _sinc_ratio(2.0 * theta, 2.0 * math.pi, s) / (2.0 * a * a - 1.0 + b)
    fc = math.sqrt((b - 1.0) / 2.0) / (root * denom)
    fs = a / (root * denom)
    second = fc * np.cos(lam * s) * np.exp(-logcosh(math.pi * s)) / 2.0
    # sin(lam s) / (2 sinh(pi s)) = lam/(2 pi) * sinc(lam s) * (pi s)/sinh(pi s)
    third = fs * lam / (2.0 * math.pi) * np.sinc(lam * s / math.pi) * np.exp(-logsinhc(math.pi * s))
    out = 4.0 * math.pi * (first - second + third)
    return float(out) if out.ndim == 0 else out


def ft_alpha_zero(beta: float, s):
    """Integral of e^{ist} / (cosh(t/2)(cosh t + beta)); nonnegative for beta > 1."""
    if not beta > 1.0:
        raise ValueError("ft_alpha_zero requires beta > 1")
    s = np.asarray(s, dtype=float)
    lam = math.acosh(beta)
    out = 2.0 * math.pi * (1.0 - math.sqrt(2.0 / (beta + 1.0)) * np.cos(lam * s)) / (beta - 1.0)
    out = out * np.exp(-logcosh(math.pi * s))
    return float(out) if out.ndim == 0 else out


def ft_sech_half(s):
    """Integral of e^{ist} / cosh(t/2): 2 pi / cosh(pi s)."""
    s = np.asarray(s, dtype=float)
    out = 2.0 * math.pi * np.exp(-logcosh(math.pi * s))
    return float(out) if out.ndim == 0 else out


def ft_cosh_beta(beta: float, s):
    """Integral of e^{ist} / (cosh t + beta) for beta in (-1, inf).

    With beta = cos(theta) this is 2 pi sinh(theta s) / (sin(theta) sinh(pi s));
    with beta = cosh(lam) it is 2 pi sin(lam s) / (sinh(lam) sinh(pi s)).
    """
    s = np.asarray(s, dtype=float)
    ps = math.pi * s
    if beta < 1.0:
        th = math.acos(beta)
        out = 2.0 * th / math.sin(th) * _sinc_ratio(th, math.pi, s)
    elif beta == 1.0:
        out = 2.0 * np.exp(-logsinhc(ps))
    else:
        lam = math.acosh(beta)
        out = 2.0 * lam / math.sinh(lam) * np.sinc(lam * s / math.pi) * np.exp(-logsinhc(ps))
    return float(out) if np.ndim(out) == 0 else out


def convcomb_ft(nu: float, lam_mix: float, s):
    """Fourier transform of e^{t/2} k(e^t) for the convex combination
    lam * extreme(nu) + (1 - lam) * extreme(1): pi N(s) / cosh(pi s)."""
    s = np.asarray(s, dtype=float)
    out = math.pi * convcomb_ft_numerator(nu, lam_mix, s) * np.exp(-logcosh(math.pi * s))
    return float(out) if out.ndim == 0 else out


def levy_density(kind: str, a: float, param: float, s):
    """Kolmogorov densities for log((1+cos th)/(cosh(at)+cos th)) and its cosh analogue.

    ``cos_kernel`` gives cosh(th s/a) / (s sinh(pi s/a)) with param = th in [0, pi);
    ``cosh_kernel`` gives cos(lam s/a) / (s sinh(pi s/a)) with param = lam >= 0.
    """
    if not a > 0:
        raise ValueError("a must be positive")
    s = np.asarray(s, dtype=float)
    if np.any(s == 0):
        raise ValueError("the density is singular at s = 0; exclude the origin")
    y = math.pi * np.abs(s) / a
    log_sinh = logsinhc(y) + np.log(y)
    if kind == "cos_kernel":
        if not (0.0 <= param < math.pi):
            raise ValueError("theta must lie in [0, pi)")
        out = np.exp(logcosh(param * s / a) - log_sinh) / np.abs(s)
    elif kind == "cosh_kernel":
        if not param >= 0.0:
            raise ValueError("lam must be >= 0")
        out = np.cos(param * s / a) * np.exp(-log_sinh) / np.abs(s)
    else:
        raise ValueError("kind must be 'cos_kernel' or 'cosh_kernel'")
    return float(out) if out.ndim == 0 else out


def bridge_levy_density(nu: float, lam_mix: float, s):
    """Kolmogorov density of log f for the geometric bridge between extreme(1) and extreme(nu).

    F(s) = (2 lam (cos(alpha s) - 1) + 1) / (2 s sinh(pi s)), alpha = arccosh beta.
    """
    if not (0.0 < nu < 1.0):
        raise ValueError("nu must lie in (0, 1)")
    s = np.asarray(s, dtype=float)
    if np.any(s == 0):
        raise ValueError("the density is singular at s = 0; exclude the origin")
    beta = (1.0 + nu * nu) / (2.0 * nu)
    alpha = math.acosh(beta)
    y = math.pi * np.abs(s)
    out = (2.0 * lam_mix * (np.cos(alpha * s) - 1.0) + 1.0) * np.exp(-logsinhc(y) - np.log(y)) / (2.0 * np.abs(s))
    return float(out) if out.ndim == 0 else out


def hyperbolic_pd_predicate(kind: str, **params) -> dict:
    """Exact positive-definiteness (and infinite divisibility where known) of model functions.

    ``cosh_beta``: 1/(cosh t + beta); ``sinh_ratio``: sinh(at) sinh(bt) / sinh(t)^2;
    ``cosh_power_product``: 1/(cosh(t/2)^k (cosh t + beta)^m).
    """
    if kind == "cosh_beta":
        beta = float(params["beta"])
        if not beta > -1.0:
            raise ValueError("beta must exceed -1")
        pd = beta <= 1.0
        # the -1 < beta <= 1 case is infinitely divisible (Levy density with cos kernel)
        return {"pd": pd, "infdiv": True if pd else False}
    if kind == "sinh_ratio":
        a, b = float(params["a"]), float(params["b"])
        if not (a > 0 and b > 0):
            raise ValueError("a and b must be positive")
        return {"pd": a <= 1.0 and b <= 1.0, "infdiv": UNKNOWN}
    if kind == "cosh_power_product":
        k, m, beta = params["k"], params["m"], float(params["beta"])
        if int(k) != k or int(m) != m or k < 1 or m < 1:
            raise ValueError("k and m must be integers >= 1")
        if not beta > 1.0:
            raise ValueError("beta must exceed 1")
        return {"pd": k >= m, "infdiv": k >= 2 * m}
    raise ValueError(f"unknown predicate kind {kind!r}")


def hyperbolic_model_terms(kind: str, **params) -> list:
    """Structured analytic form (see ``kernels.analytic_terms``) of a model function."""
    if kind == "cosh_beta":
        beta = float(params["beta"])
        return [(0.0, (("cplus", beta, -1.0),))]
    if kind == "sinh_ratio":
        a, b = float(params["a"]), float(params["b"])
        return [(math.log(a * b), (("sinhc", a, 1.0), ("sinhc", b, 1.0), ("sinhc", 1.0, -2.0)))]
    if kind == "cosh_power_product":
        k, m, beta = params["k"], params["m"], float(params["beta"])
        return [(0.0, (("cosh", 0.5, -float(k)), ("cplus", beta, -float(m))))]
    raise ValueError(f"unknown predicate kind {kind!r}")


def hyperbolic_model_function(kind: str, **params):
    """The function whose positive definiteness ``hyperbolic_pd_predicate`` decides.

    Returned as an ``EvenFunction`` carrying its analytic extension, so the
    Fourier test can integrate along a shifted line.
    """
    from .posdef import EvenFunction, function_from_terms

    terms = hyperbolic_model_terms(kind, **params)
    if kind == "cosh_beta":
        beta = float(params["beta"])

        def f(t):
            return 1.0 / (np.cosh(t) + beta)
    elif kind == "sinh_ratio":
        a, b = float(params["a"]), float(params["b"])

        def f(t):
            # (a b) sinhc(at) sinhc(bt) / sinhc(t)^2, stable for large |t|
            return a * b * np.exp(logsinhc(a * t) + logsinhc(b * t) - 2.0 * logsinhc(t))
    else:
        k, m, beta = params["k"], params["m"], float(params["beta"])

        def f(t):
            lden = k * logcosh(0.5 * t) + m * np.logaddexp(logcosh(t), math.log(beta))
            return np.exp(-lden)

    g = function_from_terms(terms, f"{kind}{params}")
    return EvenFunction(f, g.analytic, g.strip, g.label, g.terms)


def newext_threshold(nu: float) -> float:
    """Largest weight lam with lam * extreme(nu) + (1-lam) * extreme(1) in K+: 2 sqrt(nu)/(1+sqrt(nu))^2."""
    if not (0.0 < nu < 1.0):
        raise ValueError("nu must lie in the open interval (0, 1)")
    r = math.sqrt(nu)
    return 2.0 * r / (1.0 + r) ** 2


def convcomb_ft_numerator(nu: float, lam_mix: float, s):
    """N(s) = 2(1-lam) + lam sqrt(2(beta+1)) cos(alpha s), beta = (1+nu^2)/(2 nu), alpha = arccosh beta."""
    if not (0.0 < nu < 1.0):
        raise ValueError("nu must lie in (0, 1)")
    if not (0.0 <= lam_mix <= 1.0):
        raise ValueError("lam_mix must lie in [0, 1]")
    beta = (1.0 + nu * nu) / (2.0 * nu)
    alpha = math.acosh(beta)
    s = np.asarray(s, dtype=float)
    out = 2.0 * (1.0 - lam_mix) + lam_mix * math.sqrt(2.0 * (beta + 1.0)) * np.cos(alpha * s)
    return float(out) if out.ndim == 0 else out


def convcomb_numerator_min(nu: float, lam_mix: float) -> float:
    beta = (1.0 + nu * nu) / (2.0 * nu)
    return 2.0 * (1.0 - lam_mix) - lam_mix * math.sqrt(2.0 * (beta + 1.0))


def _in(v: float, lo: float, hi: float) -> bool:
    return lo <= v <= hi


def family_membership(k: MetricKernel) -> dict:
    """Known K+/K- membership as {'in_K_plus': bool|None, 'in_K_minus': bool|None}.

    ``None`` marks regions where only bounds are known.
    """
    fam = k.family
    p = k.param_dict
    plus = minus = UNKNOWN
    if fam == "extreme":
        plus = p["nu"] == 1.0
        minus = p["nu"] == 0.0
    elif fam == "heinz":
        plus = True
        minus = p["alpha"] == 0.5
    elif fam == "binomial":
        plus = p["alpha"] >= 0.0
        minus = p["alpha"] <= 0.0
    elif fam == "power_difference":
        plus = _in(p["alpha"], 0.5, 2.0)
        minus = _in(p["alpha"], -1.0, 0.5)
    elif fam == "wyd":
        q = p["p"]
        plus = _in(q, 0.0, 1.0)
        minus = _in(q, -1.0, -0.5) or _in(q, 1.5, 2.0)
    elif fam == "stolarsky":
        plus = _in(p["alpha"], -1.0, 2.0)
        minus = _in(p["alpha"], -2.0, -1.0)
    elif fam == "stolarsky_dual":
        plus = _in(p["alpha"], -2.0, -1.0)
        minus = _in(p["alpha"], -1.0, 2.0)
    elif fam == "sinh_bridge":
        plus = _in(p["alpha"], 0.0, 1.0)
        minus = _in(p["alpha"], 1.0, 2.0)
    elif fam == "convex_combo":
        nu, lam = p["nu"], p["lam"]
        if nu == 1.0 or lam == 0.0:
            plus = True
        elif nu == 0.0:
            plus = False
        else:
            plus = lam <= newext_threshold(nu)
        minus = (nu == 0.0 and lam == 1.0)
    elif fam == "heron":
        nu, lam = p["nu"], p["lam"]
        if lam == 0.0 or nu == 1.0:
            plus = True
        elif nu == 0.0:
            plus = False
        else:
            plus = False
    elif fam == "geometric_bridge":
        mu, nu, lam = p["mu"], p["nu"], p["lam"]
        if lam == 0.0:
            plus = mu == 1.0
        elif mu == 1.0 and nu == 1.0:
            plus = True
        elif mu == 1.0 and nu == 0.0:
            plus = lam <= 0.5
        elif mu == 1.0:
            plus = True if lam <= 0.25 else (False if lam > 1.0 / 3.0 else UNKNOWN)
    elif fam == "hansen_bridge":
        plus = True if p["lam"] <= 0.25 else UNKNOWN
    if fam not in ("extreme", "heinz", "binomial", "power_difference", "wyd", "stolarsky",
                   "stolarsky_dual", "sinh_bridge", "convex_combo"):
        # only x^{-1/2} lies in both classes; a known K+ member that is not it is outside K-
        if plus is True and minus is UNKNOWN:
            minus = _is_sqrt_kernel(k)
    return {"in_K_plus": plus, "in_K_minus": minus}


def _is_sqrt_kernel(k: MetricKernel) -> bool:
    t = np.linspace(-20, 20, 81)
    return bool(np.max(np.abs(k.log_weighted(t))) < 1e-12)
