"""Catalog of metric kernels ``k`` on (0, inf) and their derived views.

Every kernel is stored through its symmetrized logarithm

    w(t) = log h(t),   h(t) = e^{t/2} k(e^t),

which is an even function of ``t`` exactly when ``x k(x) = k(1/x)``.  Working
in ``t`` keeps the removable singularities at ``x = 1`` (and at the limiting
parameter values) free of cancellation: the log-type families reduce to
``log(sinh(y)/y)`` terms which are evaluated by a short Taylor series near 0.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .linalg_core import as_hermitian, rng_for

LOG2 = math.log(2.0)
SERIES_CUTOFF = 0.05
PARAM_LIMIT_TOL = 1e-8
PROPERTY_GRID = np.logspace(-6, 6, 81)


# ---------------------------------------------------------------------------
# Stable elementary pieces

def logcosh(y):
    """log(cosh(y)), accurate both near zero and for large |y|."""
    y = np.abs(np.asarray(y, dtype=float))
    small = y < SERIES_CUTOFF
    ys = np.where(small, y, 0.0)
    y2 = ys * ys
    series = y2 * (0.5 + y2 * (-1.0 / 12 + y2 * (1.0 / 45 - y2 * 17.0 / 2520)))
    yl = np.where(small, 1.0, y)
    big = yl + np.log1p(np.exp(-2.0 * yl)) - LOG2
    return np.where(small, series, big)


def logsinhc(y):
    """log(sinh(y)/y), an even function equal to 0 at the origin."""
    y = np.abs(np.asarray(y, dtype=float))
    small = y < SERIES_CUTOFF
    ys = np.where(small, y, 0.0)
    y2 = ys * ys
    series = y2 * (1.0 / 6 + y2 * (-1.0 / 180 + y2 * (1.0 / 2835 - y2 / 37800)))
    yl = np.where(small, 1.0, y)
    big = yl + np.log1p(-np.exp(-2.0 * yl)) - np.log(2.0 * yl)
    return np.where(small, series, big)


def _dlogsinhc(y):
    """First derivative of logsinhc: coth(y) - 1/y."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < SERIES_CUTOFF
    ys = np.where(small, y, 0.0)
    y2 = ys * ys
    series = ys * (1.0 / 3 + y2 * (-1.0 / 45 + y2 * 2.0 / 945))
    yl = np.where(small, 1.0, y)
    return np.where(small, series, 1.0 / np.tanh(yl) - 1.0 / yl)


def _d2logsinhc(y):
    """Second derivative of logsinhc: 1/y^2 - 1/sinh(y)^2."""
    y = np.asarray(y, dtype=float)
    small = np.abs(y) < SERIES_CUTOFF
    ys = np.where(small, y, 0.0)
    y2 = ys * ys
    series = 1.0 / 3 + y2 * (-1.0 / 15 + y2 * 2.0 / 189)
    yl = np.where(small, 1.0, y)
    with np.errstate(over="ignore"):
        csch2 = np.where(np.abs(yl) > 350, 0.0, 1.0 / np.sinh(np.clip(yl, -350, 350)) ** 2)
    return np.where(small, series, 1.0 / yl**2 - csch2)


def _log_extreme_h(nu: float, t):
    """log of (1+nu)^2 cosh(t/2) / (1 + nu^2 + 2 nu cosh t)."""
    t = np.asarray(t, dtype=float)
    lc = logcosh(t)
    if nu == 0.0:
        denom = np.zeros_like(t)
    else:
        denom = np.logaddexp(math.log1p(nu * nu), math.log(2.0 * nu) + lc)
    return 2.0 * math.log1p(nu) + logcosh(0.5 * t) - denom


# ---------------------------------------------------------------------------
# Family table: name -> (parameter names, admissible closed intervals)

FAMILIES: dict[str, tuple[tuple[str, float, float], ...]] = {
    "extreme": (("nu", 0.0, 1.0),),
    "heinz": (("alpha", 0.0, 1.0),),
    "binomial": (("alpha", -1.0, 1.0),),
    "power_difference": (("alpha", -1.0, 2.0),),
    "wyd": (("p", -1.0, 2.0),),
    "stolarsky": (("alpha", -2.0, 2.0),),
    "stolarsky_dual": (("alpha", -2.0, 2.0),),
    "convex_combo": (("nu", 0.0, 1.0), ("lam", 0.0, 1.0)),
    "geometric_bridge": (("mu", 0.0, 1.0), ("nu", 0.0, 1.0), ("lam", 0.0, 1.0)),
    "hansen_bridge": (("lam", 0.0, 1.0),),
    "sinh_bridge": (("alpha", 0.0, 2.0),),
    "heron": (("nu", 0.0, 1.0), ("lam", 0.0, 1.0)),
    "mixture": (),
    "dual": (),
    "custom": (),
}


@dataclass(frozen=True)
class MetricKernel:
    """Immutable kernel descriptor.

    ``components`` holds ``(weight, kernel)`` pairs for mixtures and the single
    wrapped kernel (weight 1) for ``dual``.  ``func`` is only used by the
    ``custom`` family, which wraps an arbitrary callable for diagnostics.
    """

    family: str
    params: tuple[tuple[str, float], ...] = ()
    components: tuple[tuple[float, "MetricKernel"], ...] = ()
    func: Callable | None = field(default=None, compare=False)
    label: str = ""

    def param(self, name: str) -> float:
        return dict(self.params)[name]

    @property
    def param_dict(self) -> dict[str, float]:
        return dict(self.params)

    def log_weighted(self, t):
        """w(t) = log(e^{t/2} k(e^t))."""
        return _log_weighted(self, np.asarray(t, dtype=float))

    def weighted(self, t):
        return np.exp(self.log_weighted(t))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.family == "custom":
            return np.asarray(self.func(x), dtype=float)
        t = np.log(x)
        return np.exp(self.log_weighted(t) - 0.5 * t)

    def __str__(self) -> str:
        if self.family == "custom":
            return f"custom({self.label or 'callable'})"
        if self.family == "dual":
            return f"dual({self.components[0][1]})"
        if self.family == "mixture":
            inner = ", ".join(f"{w:g}*{k}" for w, k in self.components)
            return f"mixture({inner})"
        inner = ", ".join(f"{n}={v:g}" for n, v in self.params)
        return f"{self.family}({inner})"


def _log_weighted(k: MetricKernel, t: np.ndarray):
    fam = k.family
    p = k.param_dict
    if fam == "extreme":
        return _log_extreme_h(p["nu"], t)
    if fam == "heinz":
        return -logcosh((p["alpha"] - 0.5) * t)
    if fam == "binomial":
        a = p["alpha"]
        if a == 0.0:
            return np.zeros_like(t)
        return -logcosh(0.5 * a * t) / a
    if fam == "power_difference":
        a = p["alpha"]
        return logsinhc(0.5 * (1.0 - a) * t) - logsinhc(0.5 * a * t)
    if fam == "wyd":
        q = p["p"]
        return logsinhc(0.5 * q * t) + logsinhc(0.5 * (1.0 - q) * t) - 2.0 * logsinhc(0.5 * t)
    if fam in ("stolarsky", "stolarsky_dual"):
        w = _log_stolarsky(p["alpha"], t)
        return w if fam == "stolarsky" else -w
    if fam == "convex_combo":
        return _log_mix2(p["lam"], _log_extreme_h(p["nu"], t), _log_extreme_h(1.0, t))
    if fam == "heron":
        return _log_mix2(p["lam"], _log_extreme_h(p["nu"], t), np.zeros_like(t))
    if fam == "geometric_bridge":
        lam = p["lam"]
        return (1.0 - lam) * _log_extreme_h(p["mu"], t) + lam * _log_extreme_h(p["nu"], t)
    if fam == "hansen_bridge":
        lam = p["lam"]
        return (1.0 - lam) * _log_extreme_h(1.0, t) + lam * _log_extreme_h(1.0 - lam, t)
    if fam == "sinh_bridge":
        return logsinhc(0.5 * p["alpha"] * t) - logsinhc(0.5 * t)
    if fam == "mixture":
        logs = np.array([_log_weighted(c, t) for _, c in k.components])
        weights = np.array([w for w, _ in k.components])
        shape = (-1,) + (1,) * t.ndim
        return logsumexp(logs, axis=0, b=weights.reshape(shape))
    if fam == "dual":
        return -_log_weighted(k.components[0][1], -t)
    if fam == "custom":
        return 0.5 * t + np.log(np.asarray(k.func(np.exp(t)), dtype=float))
    raise ValueError(f"unknown family {fam!r}")


def _log_mix2(lam: float, w_a, w_b):
    """log(lam e^{w_a} + (1-lam) e^{w_b})."""
    if lam == 0.0:
        return w_b
    if lam == 1.0:
        return w_a
    return np.logaddexp(math.log(lam) + w_a, math.log1p(-lam) + w_b)


def _log_stolarsky(a: float, t: np.ndarray):
    half = 0.5 * t
    d = 1.0 - a
    if abs(d) < PARAM_LIMIT_TOL:
        # expand lsc(a t/2) around a = 1 in powers of d
        return -half * _dlogsinhc(half) + 0.5 * d * half**2 * _d2logsinhc(half)
    return (logsinhc(a * half) - logsinhc(half)) / d


# ---------------------------------------------------------------------------
# Construction and serialization

def make_kernel(family: str, params: dict | None = None, **kwargs) -> MetricKernel:
    """Build a catalog kernel, validating parameters against closed intervals.

    >>> make_kernel("extreme", nu=1.0)(3.0)
    array(0.5)
    """
    params = dict(params or {}, **kwargs)
    if family not in FAMILIES or family in ("mixture", "dual", "custom"):
        if family == "mixture":
            return make_mixture(params.pop("components"))
        if family == "dual":
            return dual(params.pop("kernel"))
        raise ValueError(f"unknown family {family!r}; known: {sorted(FAMILIES)}")
    spec = FAMILIES[family]
    names = [s[0] for s in spec]
    extra = set(params) - set(names)
    if extra:
        raise ValueError(f"{family} takes parameters {names}, got unexpected {sorted(extra)}")
    values = []
    for name, lo, hi in spec:
        if name not in params:
            raise ValueError(f"{family} requires parameter {name!r}")
        v = float(params[name])
        if not math.isfinite(v) or v < lo or v > hi:
            raise ValueError(f"{family}: {name}={v} outside admissible interval [{lo:g}, {hi:g}]")
        values.append((name, v))
    return MetricKernel(family, tuple(values))


def make_mixture(components: Sequence[tuple[float, MetricKernel]]) -> MetricKernel:
    comps = []
    for w, k in components:
        if isinstance(k, dict):
            k = kernel_from_dict(k)
        w = float(w)
        if w < 0 or not math.isfinite(w):
            raise ValueError("mixture weights must be nonnegative")
        comps.append((w, k))
    if not comps:
        raise ValueError("mixture needs at least one component")
    total = sum(w for w, _ in comps)
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"mixture weights must sum to 1, got {total!r}")
    return MetricKernel("mixture", (), tuple(comps))


def custom_kernel(func: Callable, label: str = "") -> MetricKernel:
    """Wrap an arbitrary positive function for diagnostics (not serializable)."""
    return MetricKernel("custom", (), (), func=func, label=label)


def kernel_to_dict(k: MetricKernel) -> dict:
    if k.family == "custom":
        raise ValueError("custom kernels cannot be serialized")
    d: dict = {"family": k.family, "params": dict(k.params)}
    if k.family == "mixture":
        d["components"] = [{"weight": w, "kernel": kernel_to_dict(c)} for w, c in k.components]
    elif k.family == "dual":
        d["kernel"] = kernel_to_dict(k.components[0][1])
    return d


def kernel_from_dict(d: dict) -> MetricKernel:
    if not isinstance(d, dict) or "family" not in d:
        raise ValueError("kernel descriptor must be an object with a 'family' field")
    fam = d["family"]
    if fam == "mixture":
        comps = [(c["weight"], kernel_from_dict(c["kernel"])) for c in d.get("components", [])]
        return make_mixture(comps)
    if fam == "dual":
        return dual(kernel_from_dict(d["kernel"]))
    return make_kernel(fam, d.get("params", {}))


def kernel_to_json(k: MetricKernel) -> str:
    return json.dumps(kernel_to_dict(k), sort_keys=True)


def kernel_from_json(s: str) -> MetricKernel:
    return kernel_from_dict(json.loads(s))


# ---------------------------------------------------------------------------
# Evaluation and derived views

def _check_positive(x, name: str = "x") -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise ValueError(f"{name} must be positive and finite")
    return x


def evaluate(k: MetricKernel, x):
    """k(x) for positive ``x`` (scalar or array)."""
    x = _check_positive(x)
    out = k(x)
    return float(out) if out.ndim == 0 else out


def dual(k: MetricKernel) -> MetricKernel:
    """The dual kernel x -> 1/k(1/x).

    Families closed under duality map to their named partner so that the
    result stays serializable in the natural form.
    """
    fam = k.family
    p = k.param_dict
    if fam == "dual":
        return k.components[0][1]
    if fam == "binomial":
        return make_kernel("binomial", alpha=-p["alpha"] + 0.0)
    if fam == "power_difference":
        return make_kernel("power_difference", alpha=1.0 - p["alpha"])
    if fam == "stolarsky":
        return make_kernel("stolarsky_dual", alpha=p["alpha"])
    if fam == "stolarsky_dual":
        return make_kernel("stolarsky", alpha=p["alpha"])
    if fam == "extreme" and p["nu"] in (0.0, 1.0):
        return make_kernel("extreme", nu=1.0 - p["nu"])
    if fam == "heinz" and p["alpha"] == 0.5:
        return k
    return MetricKernel("dual", (), ((1.0, k),))


def derived_eval(k: MetricKernel, which: str, x):
    """Derived functions: ``f = 1/k``, ``g = (1-x)^2 k`` or ``weighted = e^{t/2}k(e^t)`` at ``t = log x``."""
    x = _check_positive(x)
    if which == "f":
        out = 1.0 / k(x)
    elif which == "g":
        out = (1.0 - x) ** 2 * k(x)
    elif which == "weighted":
        out = k.weighted(np.log(x))
    else:
        raise ValueError("which must be one of 'f', 'g', 'weighted'")
    return float(out) if np.ndim(out) == 0 else out


def scalar_mean(k: MetricKernel, x, y):
    """Symmetric homogeneous mean M(x, y) = y / k(x/y)."""
    x = _check_positive(x, "x")
    y = _check_positive(y, "y")
    out = y / k(x / y)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DiscreteMeasure:
    """Finitely supported probability measure on [0, 1]."""

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if not self.atoms:
            raise ValueError("measure needs at least one atom")
        total = 0.0
        for nu, w in self.atoms:
            if not (0.0 <= nu <= 1.0):
                raise ValueError(f"atom location {nu} outside [0, 1]")
            if not (w >= 0.0):
                raise ValueError(f"atom weight {w} is negative")
            total += w
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total!r}")


def extreme_value(nu: float, x):
    x = np.asarray(x, dtype=float)
    return 0.5 * (1.0 + nu) ** 2 * (1.0 + x) / ((x + nu) * (1.0 + nu * x))


def integral_representation_eval(m: DiscreteMeasure, x):
    """Integral of the extreme kernels against a discrete measure."""
    x = _check_positive(x)
    out = sum(w * extreme_value(nu, x) for nu, w in m.atoms)
    return float(out) if np.ndim(out) == 0 else out


def as_measure(k: MetricKernel) -> DiscreteMeasure | None:
    """Representing measure for kernels that are finite mixtures of extreme points."""
    p = k.param_dict
    if k.family == "extreme":
        return DiscreteMeasure(((p["nu"], 1.0),))
    if k.family == "convex_combo":
        lam = p["lam"]
        atoms = tuple(a for a in ((p["nu"], lam), (1.0, 1.0 - lam)) if a[1] > 0)
        return DiscreteMeasure(atoms)
    return None


# ---------------------------------------------------------------------------
# Sampled class-K checks

@dataclass
class ClassKReport:
    symmetry_residual: float
    bound_violation: float
    normalization_error: float
    monotone_min_eig: float
    monotone_pairs: int
    boundary_finite: bool
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures


def _kfun_matrix(k: MetricKernel, a: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(a)
    return (u * k(w)) @ u.conj().T


def check_class_K(
    k: MetricKernel,
    pairs: int = 200,
    max_dim: int = 5,
    seed: int = 0,
    sym_tol: float = 1e-10,
    bound_tol: float = 1e-12,
    mono_tol: float = 1e-8,
) -> ClassKReport:
    """Run the sampled class-K checks and report residuals and failures.

    Symmetry residuals and bound violations are relative to the local size
    of ``k``.  Matrix monotonicity is probed on random pairs ``A >= B > 0``
    through the spectral calculus.
    """
    x = PROPERTY_GRID
    failures: list[str] = []
    with np.errstate(all="ignore"):
        kx = k(x)
        kinv = k(1.0 / x)
        sym = np.abs(x * kx - kinv) / np.maximum(np.abs(kinv), 1e-300)
        sym_res = float(np.nanmax(np.where(np.isfinite(sym), sym, np.inf)))
        lower = 2.0 / (1.0 + x)
        upper = (1.0 + x) / (2.0 * x)
        viol = np.maximum((lower - kx) / lower, (kx - upper) / upper)
        bound_res = float(np.nanmax(np.where(np.isfinite(viol), viol, np.inf)))
        norm_err = float(abs(k(np.array(1.0)) - 1.0))
    if not norm_err <= 1e-12:
        failures.append(f"normalization: |k(1)-1| = {norm_err:.3e}")
    if not sym_res <= sym_tol:
        failures.append(f"symmetry: max residual {sym_res:.3e}")
    if not bound_res <= bound_tol:
        failures.append(f"bounds: max violation {bound_res:.3e}")

    with np.errstate(all="ignore"):
        near0 = np.logspace(-12, -6, 13)
        far = np.logspace(6, 12, 13)
        b0 = near0 * k(near0)
        binf = k(far)
    boundary_ok = bool(np.all(np.isfinite(b0)) and np.all(np.isfinite(binf)) and b0.max() <= 2 * b0[-1] + 1.0)
    if not boundary_ok:
        failures.append("boundary: x k(x) near 0 or k(x) near infinity not bounded")

    rng = rng_for("check_class_K", seed)
    worst = np.inf
    for _ in range(pairs):
        d = int(rng.integers(1, max_dim + 1))
        g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
        q, _r = np.linalg.qr(g)
        spec = np.exp(rng.uniform(np.log(0.05), np.log(20.0), d))
        b = (q * spec) @ q.conj().T
        r = int(rng.integers(1, d + 1))
        v = rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))
        a = b + rng.uniform(0.01, 5.0) * (v @ v.conj().T) / r
        with np.errstate(all="ignore"):
            diff = _kfun_matrix(k, as_hermitian(b)) - _kfun_matrix(k, as_hermitian(a))
        if not np.all(np.isfinite(diff)):
            worst = -np.inf
            break
        scale = max(1.0, float(np.max(np.abs(k(spec)))))
        worst = min(worst, float(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))[0]) / scale)
    if not worst >= -mono_tol:
        failures.append(f"matrix monotone decreasing: min eigenvalue {worst:.3e}")
    return ClassKReport(sym_res, bound_res, norm_err, worst, pairs, boundary_ok, failures)


def catalog_samples() -> list[MetricKernel]:
    """A representative set of kernels spanning every family."""
    out = []
    for nu in (0.0, 0.3, 1.0):
        out.append(make_kernel("extreme", nu=nu))
    for a in (0.0, 0.25, 0.5, 1.0):
        out.append(make_kernel("heinz", alpha=a))
    for a in (-1.0, -0.5, 0.0, 0.5, 1.0):
        out.append(make_kernel("binomial", alpha=a))
    for a in (-1.0, 0.0, 0.5, 1.0, 2.0):
        out.append(make_kernel("power_difference", alpha=a))
    for q in (-1.0, -0.5, 0.0, 0.5, 1.0, 1.5, 2.0):
        out.append(make_kernel("wyd", p=q))
    for a in (-2.0, -1.0, 0.0, 0.5, 1.0, 2.0):
        out.append(make_kernel("stolarsky", alpha=a))
        out.append(make_kernel("stolarsky_dual", alpha=a))
    out.append(make_kernel("convex_combo", nu=0.25, lam=0.4))
    out.append(make_kernel("geometric_bridge", mu=1.0, nu=0.5, lam=0.3))
    out.append(make_kernel("hansen_bridge", lam=0.5))
    for a in (0.0, 0.5, 1.0, 2.0):
        out.append(make_kernel("sinh_bridge", alpha=a))
    out.append(make_kernel("heron", nu=0.5, lam=0.5))
    out.append(make_mixture([(0.3, make_kernel("wyd", p=0.5)), (0.7, make_kernel("heinz", alpha=0.2))]))
    return out


# ---------------------------------------------------------------------------
# Analytic continuation of the weighted function into a horizontal strip.
#
# Most catalog kernels have h(t) = e^{t/2} k(e^t) of the form
#     sum_terms exp(c) * prod_factors base(z)^power
# with entire bases.  Knowing this structure lets the Fourier test integrate
# along Im z = y, which multiplies the transform by e^{sy} and exposes
# negativity that is far below double precision on the real line.

# kinds: cosh -> cosh(a z), sinhc -> sinh(a z)/(a z), ext -> 1 + a^2 + 2a cosh z,
# cplus -> cosh z + a, stol1 -> exp(1 - (z/2) coth(z/2))
Factor = tuple[str, float, float]  # (kind, coefficient, power)
Term = tuple[float, tuple[Factor, ...]]


def _factor_strip(kind: str, a: float, power: float) -> float:
    """Half-width of the strip around the real axis where base^power is analytic."""
    if kind == "stol1":
        return 2.0 * math.pi
    if power > 0 and float(power).is_integer():
        return math.inf
    if a == 0.0:
        return math.inf
    if kind == "cosh":
        return math.pi / (2.0 * abs(a))
    if kind == "sinhc":
        return math.pi / abs(a)
    if kind == "ext":
        return math.pi
    if kind == "cplus":
        return math.pi if a >= 1.0 else math.pi - math.acos(a)
    raise ValueError(kind)


def _clog_cosh(w):
    w = np.where(w.real < 0, -w, w)
    return w + np.log1p(np.exp(-2.0 * w)) - LOG2


def _clog_sinhc(w):
    w = np.where(w.real < 0, -w, w)
    zero = w == 0
    ws = np.where(zero, 1.0, w)
    out = ws + np.log(-np.expm1(-2.0 * ws)) - LOG2 - np.log(ws)
    return np.where(zero, 0.0, out)


def _clog_factor(kind: str, a: float, z):
    if kind == "cosh":
        return _clog_cosh(a * z)
    if kind == "sinhc":
        return _clog_sinhc(a * z)
    if kind == "ext":
        return np.log(1.0 + a * a + 2.0 * a * np.cosh(z))
    if kind == "cplus":
        return np.log(np.cosh(z) + a)
    if kind == "stol1":
        half = 0.5 * np.where(z == 0, 1.0, z)
        return np.where(z == 0, 0.0, 1.0 - half / np.tanh(half))
    raise ValueError(kind)


def _ext_term(nu: float, scale: float = 1.0) -> Term:
    factors: tuple[Factor, ...] = (("cosh", 0.5, scale),)
    if nu > 0.0:
        factors += (("ext", nu, -scale),)
    return (2.0 * math.log1p(nu) * scale, factors)


def _scale_term(term: Term, s: float) -> Term:
    c, fs = term
    return (c * s, tuple((kd, a, p * s) for kd, a, p in fs))


def _product(*terms: Term) -> Term:
    c = sum(t[0] for t in terms)
    fs = tuple(f for t in terms for f in t[1])
    return (c, fs)


def analytic_terms(k: MetricKernel) -> list[Term] | None:
    """Structured form of h(z) = e^{z/2} k(e^z), or None when unavailable."""
    fam = k.family
    p = k.param_dict
    if fam == "extreme":
        return [_ext_term(p["nu"])]
    if fam == "heinz":
        return [(0.0, (("cosh", p["alpha"] - 0.5, -1.0),))]
    if fam == "binomial":
        a = p["alpha"]
        return [(0.0, ())] if a == 0.0 else [(0.0, (("cosh", 0.5 * a, -1.0 / a),))]
    if fam == "power_difference":
        a = p["alpha"]
        return [(0.0, (("sinhc", 0.5 * (1.0 - a), 1.0), ("sinhc", 0.5 * a, -1.0)))]
    if fam == "wyd":
        q = p["p"]
        return [(0.0, (("sinhc", 0.5 * q, 1.0), ("sinhc", 0.5 * (1.0 - q), 1.0), ("sinhc", 0.5, -2.0)))]
    if fam in ("stolarsky", "stolarsky_dual"):
        a = p["alpha"]
        sign = 1.0 if fam == "stolarsky" else -1.0
        if abs(1.0 - a) < PARAM_LIMIT_TOL:
            return [(0.0, (("stol1", 0.5, sign),))]
        r = sign / (1.0 - a)
        return [(0.0, (("sinhc", 0.5 * a, r), ("sinhc", 0.5, -r)))]
    if fam == "sinh_bridge":
        return [(0.0, (("sinhc", 0.5 * p["alpha"], 1.0), ("sinhc", 0.5, -1.0)))]
    if fam in ("geometric_bridge", "hansen_bridge"):
        lam = p["lam"]
        mu, nu = (p["mu"], p["nu"]) if fam == "geometric_bridge" else (1.0, 1.0 - lam)
        return [_product(_scale_term(_ext_term(mu), 1.0 - lam), _scale_term(_ext_term(nu), lam))]
    if fam in ("convex_combo", "heron"):
        lam = p["lam"]
        other = _ext_term(1.0) if fam == "convex_combo" else (0.0, ())
        terms = []
        if lam > 0:
            c, fs = _ext_term(p["nu"])
            terms.append((c + math.log(lam), fs))
        if lam < 1:
            terms.append((other[0] + math.log1p(-lam), other[1]))
        return terms
    if fam == "mixture":
        out = []
        for w, comp in k.components:
            sub = analytic_terms(comp)
            if sub is None:
                return None
            if w > 0:
                out.extend((c + math.log(w), fs) for c, fs in sub)
        return out
    if fam == "dual":
        sub = analytic_terms(k.components[0][1])
        if sub is None or len(sub) != 1:
            return None
        return [_scale_term(sub[0], -1.0)]
    return None


def terms_strip(terms: Sequence[Term]) -> float:
    strip = math.inf
    for _c, fs in terms:
        for kind, a, pw in fs:
            strip = min(strip, _factor_strip(kind, a, pw))
    return strip


def eval_terms(terms: Sequence[Term], z) -> np.ndarray:
    """Evaluate a structured weighted function at complex points inside its strip."""
    z = np.asarray(z, dtype=complex)
    total = np.zeros_like(z)
    for c, fs in terms:
        logv = np.full_like(z, c)
        for kind, a, pw in fs:
            logv = logv + pw * _clog_factor(kind, a, z)
        total = total + np.exp(logv)
    return total


def ratio_terms(num: Sequence[Term] | None, den: Sequence[Term] | None) -> list[Term] | None:
    """Structured form of h_num / h_den when the denominator has a single term."""
    if num is None or den is None or len(den) != 1:
        return None
    inv = _scale_term(den[0], -1.0)
    return [_product(t, inv) for t in num]


def power_terms(terms: Sequence[Term] | None, r: float) -> list[Term] | None:
    if terms is None or len(terms) != 1:
        return None
    return [_scale_term(terms[0], r)]
