"""Numerical positive-definiteness tests for real even functions.

Two independent routes are provided.  ``gram_test`` samples point sets and
looks for a Gram matrix [h(t_i - t_j)] with a negative eigenvalue; it can only
refute.  ``fourier_test`` evaluates the transform of ``h`` on a frequency grid
and can both refute and (up to a quantified truncation bound) certify.

When the function comes with an analytic extension to a strip |Im z| < a, the
transform is integrated along Im z = y < a.  By Cauchy's theorem this yields
e^{sy} times the real-line transform, so negative values that are
exponentially small in ``s`` become visible in double precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Sequence

import numpy as np

from .kernels import (
    MetricKernel,
    analytic_terms,
    dual,
    eval_terms,
    power_terms,
    ratio_terms,
    terms_strip,
)
from .linalg_core import rng_for

PD = "positive_definite"
NPD = "not_positive_definite"
INCONCLUSIVE = "inconclusive"

EVEN_TOL = 1e-10
MAX_SHIFT = 8.0
ROUNDOFF_EDGE = 1e-14


@dataclass(frozen=True)
class TestConfig:
    """Knobs of the positivity engine (all positive)."""

    gram_size: int = 24
    gram_trials: int = 200
    point_scale: float = 40.0
    fourier_halfwidth: float = 80.0
    fourier_samples: int = 2**14
    tolerance: float = 1e-9
    max_halfwidth: float = 320.0
    shift_fraction: float = 0.9
    pad_factor: int = 4
    seed: int = 0

    __test__ = False  # keep pytest from collecting this class

    def __post_init__(self):
        for name, value in asdict(self).items():
            if name == "seed":
                continue
            if not value > 0:
                raise ValueError(f"TestConfig.{name} must be positive, got {value!r}")
        if not self.shift_fraction < 1:
            raise ValueError("shift_fraction must be < 1")

    @classmethod
    def from_dict(cls, d: dict) -> "TestConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown TestConfig fields: {sorted(unknown)}")
        return cls(**d)


@dataclass
class PosDefVerdict:
    verdict: str
    margin: float
    method: str
    detail: dict = field(default_factory=dict)
    witness: dict | None = None

    @property
    def positive(self) -> bool:
        return self.verdict == PD

    @property
    def negative(self) -> bool:
        return self.verdict == NPD

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "margin": float(self.margin),
            "method": self.method,
            "witness": self.witness,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class EvenFunction:
    """A real even function with an optional analytic extension.

    ``analytic(z)`` must agree with ``func`` on the real axis and be analytic
    for |Im z| < ``strip``.
    """

    func: Callable
    analytic: Callable | None = None
    strip: float = 0.0
    label: str = ""
    terms: tuple | None = None

    def __call__(self, t):
        return np.asarray(self.func(np.asarray(t, dtype=float)), dtype=float)


def as_even_function(h) -> EvenFunction:
    if isinstance(h, EvenFunction):
        return h
    if isinstance(h, MetricKernel):
        return kernel_weighted_function(h)
    if callable(h):
        return EvenFunction(h)
    raise TypeError("expected a callable or EvenFunction")


def _from_terms(func: Callable, terms, label: str) -> EvenFunction:
    if terms is None:
        return EvenFunction(func, label=label)
    terms = tuple(terms)
    strip = terms_strip(terms)
    return EvenFunction(func, lambda z, _t=terms: eval_terms(_t, z), strip, label, terms)


def function_from_terms(terms, label: str = "") -> EvenFunction:
    """Even function given only by its structured analytic form."""
    terms = tuple(terms)
    return _from_terms(lambda t: eval_terms(terms, np.asarray(t, dtype=float) + 0j).real, terms, label)


def kernel_weighted_function(k: MetricKernel) -> EvenFunction:
    """h(t) = e^{t/2} k(e^t), whose positive definiteness decides K+ membership."""
    return _from_terms(k.weighted, analytic_terms(k), f"weighted[{k}]")


def kernel_ratio_function(k1: MetricKernel, k2: MetricKernel) -> EvenFunction:
    """h(t) = k1(e^t) / k2(e^t)."""

    def f(t):
        return np.exp(k1.log_weighted(t) - k2.log_weighted(t))

    return _from_terms(f, ratio_terms(analytic_terms(k1), analytic_terms(k2)), f"ratio[{k1}/{k2}]")


def power_function(h: EvenFunction, r: float, terms=None) -> EvenFunction:
    def f(t):
        return np.abs(h(t)) ** r

    if terms is not None:
        return _from_terms(f, power_terms(terms, r), f"{h.label}^{r:g}")
    return EvenFunction(f, label=f"{h.label}^{r:g}")


# ---------------------------------------------------------------------------
# Gram test

def _gram_points(rng: np.random.Generator, n: int, scale: float, trial: int) -> np.ndarray:
    mode = trial % 3
    if mode == 0:
        return rng.uniform(-scale, scale, n)
    if mode == 1:
        start = rng.uniform(0.01, 1.0)
        pts = start * 1.5 ** np.arange(n)
        pts = pts[pts <= scale] if np.any(pts <= scale) else pts[:1]
        signs = rng.choice([-1.0, 1.0], pts.size)
        extra = rng.uniform(-scale, scale, n - pts.size)
        return np.concatenate([signs * pts, extra])
    step = math.exp(rng.uniform(math.log(0.05), math.log(3.0)))
    return step * (np.arange(n) - n / 2.0) + rng.uniform(-1.0, 1.0)


def gram_test(h, cfg: TestConfig = TestConfig()) -> PosDefVerdict:
    """Search random point sets for a Gram matrix with a negative eigenvalue.

    Never certifies positivity: without a violation the verdict is
    ``inconclusive`` with the worst observed normalized eigenvalue.
    """
    f = as_even_function(h)
    h0 = float(f(np.array(0.0)))
    if not (math.isfinite(h0) and h0 > 0):
        raise ValueError(f"h(0) must be positive and finite, got {h0}")
    rng = rng_for("gram_test", cfg.seed)
    worst = math.inf
    worst_pts = None
    for trial in range(cfg.gram_trials):
        pts = _gram_points(rng, cfg.gram_size, cfg.point_scale, trial)
        diff = pts[:, None] - pts[None, :]
        g = f(diff)
        g = 0.5 * (g + g.T)
        if not np.all(np.isfinite(g)):
            continue
        w, v = np.linalg.eigh(g)
        m = float(w[0]) / h0
        if m < worst:
            worst = m
            worst_pts = (pts, v[:, 0])
        if m < -cfg.tolerance:
            witness = {
                "kind": "gram",
                "points": [float(p) for p in pts],
                "vector": [float(x) for x in v[:, 0]],
                "min_eigenvalue": float(w[0]),
                "trial": trial,
            }
            return PosDefVerdict(NPD, m, "gram", {"trials": trial + 1, "h0": h0}, witness)
    detail = {"trials": cfg.gram_trials, "h0": h0}
    return PosDefVerdict(INCONCLUSIVE, worst, "gram", detail, None)


def verify_gram_witness(h, witness: dict) -> float:
    """Recompute the smallest Gram eigenvalue for a stored point set."""
    f = as_even_function(h)
    pts = np.asarray(witness["points"], dtype=float)
    g = f(pts[:, None] - pts[None, :])
    return float(np.linalg.eigvalsh(0.5 * (g + g.T))[0])


# ---------------------------------------------------------------------------
# Fourier test

def _tail_bound(t: np.ndarray, vals: np.ndarray, h0: float) -> tuple[float, float]:
    """Two-sided truncation bound from an exponential fit to |h| over the last tenth of the window.

    Returns (bound, decay_rate).  An edge already at the rounding level of
    h(0) counts as converged, since a fit to pure roundoff has no meaningful slope.
    """
    n = t.size
    sel = slice(int(0.9 * n), n)
    tt = t[sel]
    mag = np.abs(vals[sel])
    floor = 1e-300
    edge = float(mag.max()) if mag.size else 0.0
    if edge <= ROUNDOFF_EDGE * h0:
        return 0.0, math.inf
    logm = np.log(np.maximum(mag, floor))
    slope = np.polyfit(tt - tt[0], logm, 1)[0]
    rate = -float(slope)
    if rate <= 0:
        return math.inf, rate
    return 2.0 * edge / rate, rate


def _cosine_transform(vals: np.ndarray, t0: float, dt: float, pad: int):
    """Trapezoid-rule transform sum_n w_n v_n e^{i s t_n} dt on the FFT grid.

    Returns (s, values) for 0 <= s <= pi / (2 dt).
    """
    n = vals.size
    w = np.ones(n)
    w[0] = w[-1] = 0.5
    m = pad * (n - 1)
    spec = np.fft.ifft(w * vals, m) * m
    s = 2.0 * math.pi * np.arange(m) / (m * dt)
    keep = s <= math.pi / (2.0 * dt)
    s = s[keep]
    g = dt * np.exp(1j * s * t0) * spec[keep]
    return s, g


def fourier_test(h, cfg: TestConfig = TestConfig()) -> PosDefVerdict:
    """Decide positive definiteness from the sign of the Fourier transform.

    ``positive_definite`` requires the transform to stay above -tol * h(0) on
    the whole frequency grid and the truncation bound to be below the
    tolerance; ``not_positive_definite`` requires a frequency where it drops
    below -(tol + bound) * h(0) (or a point where |h(t)| > h(0)).
    """
    f = as_even_function(h)
    h0 = float(f(np.array(0.0)))
    if not (math.isfinite(h0) and h0 > 0):
        raise ValueError(f"h(0) must be positive and finite, got {h0}")
    tol = cfg.tolerance
    halfwidth = cfg.fourier_halfwidth
    while True:
        n = int(round(cfg.fourier_samples * halfwidth / cfg.fourier_halfwidth))
        t = np.linspace(-halfwidth, halfwidth, n + 1)
        dt = t[1] - t[0]
        with np.errstate(over="ignore", invalid="ignore"):
            vals = f(t)
        finite = np.isfinite(vals)
        if not finite[n // 2]:
            raise ValueError("h is not finite at 0")
        asym = np.max(np.abs(np.where(finite, vals - vals[::-1], 0.0)))
        if asym > EVEN_TOL * max(h0, 1.0):
            raise ValueError(f"h is not even (asymmetry {asym:.3e})")

        # growth at the window edge: bounded functions cannot exceed h(0)
        edge = vals[-1] if finite[-1] else math.inf
        if edge > h0 * (1.0 + tol):
            witness = {"kind": "unbounded", "t": float(t[-1]), "value": float(edge), "h0": h0}
            return PosDefVerdict(NPD, -(edge - h0) / h0, "unbounded", {"halfwidth": halfwidth}, witness)
        absmax = np.where(finite, np.abs(vals), math.inf)
        i = int(np.argmax(absmax))
        if absmax[i] > h0 * (1.0 + tol):
            ti = float(t[i])
            witness = {
                "kind": "gram",
                "points": [0.0, ti],
                "vector": [1.0 / math.sqrt(2), -math.copysign(1.0 / math.sqrt(2), vals[i])],
                "min_eigenvalue": float(h0 - abs(vals[i])),
            }
            return PosDefVerdict(NPD, (h0 - abs(vals[i])) / h0, "gram", {"halfwidth": halfwidth}, witness)

        # a constant limit at infinity contributes a point mass at s = 0
        last = vals[int(0.9 * n):]
        c_inf = 0.0
        if abs(last[-1]) > tol * h0 and np.ptp(last) <= tol * h0:
            c_inf = float(last[-1])
        rem = vals - c_inf
        tail, rate = _tail_bound(t, rem, h0)

        shift = 0.0
        if f.analytic is not None and f.strip > 0:
            shift = min(cfg.shift_fraction * f.strip, MAX_SHIFT)
        if shift > 0:
            with np.errstate(over="ignore", invalid="ignore"):
                cvals = np.asarray(f.analytic(t + 1j * shift), dtype=complex) - c_inf
            if not np.all(np.isfinite(cvals)):
                shift = 0.0
            else:
                ctail, _ = _tail_bound(t, cvals, h0)
                tail = max(tail, ctail)
        if tail > tol * h0 and halfwidth < cfg.max_halfwidth:
            halfwidth = min(2.0 * halfwidth, cfg.max_halfwidth)
            continue
        break

    if shift > 0:
        s, g = _cosine_transform(cvals, -halfwidth, dt, cfg.pad_factor)
    else:
        s, g = _cosine_transform(rem, -halfwidth, dt, cfg.pad_factor)
    gr = g.real
    # roundoff floor of the quadrature sum
    source = cvals if shift > 0 else rem
    noise = 1e-14 * float(np.sum(np.abs(source)) * dt)
    err = tail + noise
    j = int(np.argmin(gr))
    gmin = float(gr[j])
    margin = gmin / h0
    detail = {
        "halfwidth": halfwidth,
        "samples": int(t.size),
        "shift": shift,
        "tail_bound": tail,
        "decay_rate": rate,
        "limit_at_infinity": c_inf,
        "s_max": float(s[-1]),
        "worst_s": float(s[j]),
        "imag_residual": float(np.max(np.abs(g.imag))) / h0,
    }
    if c_inf < -tol * h0:
        witness = {"kind": "limit", "value": c_inf}
        return PosDefVerdict(NPD, c_inf / h0, "fourier", detail, witness)
    if gmin < -(tol * h0 + err):
        witness = {
            "kind": "frequency",
            "s": float(s[j]),
            "shift": shift,
            "shifted_value": gmin,
            "transform_value": gmin * math.exp(-float(s[j]) * shift),
            "threshold": -(tol * h0 + err),
        }
        return PosDefVerdict(NPD, margin, "fourier", detail, witness)
    if gmin >= -tol * h0 and tail <= tol * h0:
        return PosDefVerdict(PD, max(margin, 0.0), "fourier", detail, None)
    return PosDefVerdict(INCONCLUSIVE, margin, "fourier", detail, None)


def shifted_transform(h, s: float, shift: float = 0.0, limit: float = 0.0, halfwidth: float = 200.0) -> float:
    """Independent re-evaluation of a frequency witness by adaptive quadrature."""
    from scipy.integrate import quad

    f = as_even_function(h)
    if shift == 0.0:
        def re(t):
            return (float(f(np.array(t))) - limit) * math.cos(s * t)
    else:
        def re(t):
            v = complex(f.analytic(np.array(t + 1j * shift))) - limit
            return (v * complex(math.cos(s * t), math.sin(s * t))).real
    total = 0.0
    edges = np.linspace(-halfwidth, halfwidth, 81)
    for a, b in zip(edges[:-1], edges[1:]):
        total += quad(re, a, b, limit=200, epsabs=1e-15, epsrel=1e-12)[0]
    return total


# ---------------------------------------------------------------------------
# Kernel-level tests

def cp_test(k: MetricKernel, cfg: TestConfig = TestConfig()) -> PosDefVerdict:
    """K+ membership of ``k``: positive definiteness of e^{t/2} k(e^t)."""
    f = kernel_weighted_function(k)
    v = fourier_test(f, cfg)
    v.detail["kernel"] = str(k)
    if v.verdict != PD:
        g = gram_test(f, cfg)
        v.detail["gram_cross_check"] = g.verdict
        v.detail["gram_margin"] = g.margin
        if g.verdict == NPD and v.verdict == INCONCLUSIVE:
            g.detail.update(v.detail)
            g.detail["fourier_verdict"] = INCONCLUSIVE
            return g
        if g.verdict == NPD and v.witness is not None and v.witness.get("kind") == "frequency":
            v.detail["gram_witness"] = g.witness
    return v


@dataclass
class MembershipResult:
    label: str
    in_K_plus: bool | None
    in_K_minus: bool | None
    plus: PosDefVerdict
    minus: PosDefVerdict

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "in_K_plus": self.in_K_plus,
            "in_K_minus": self.in_K_minus,
            "plus": self.plus.to_dict(),
            "minus": self.minus.to_dict(),
        }


def _is_sqrt_kernel(k: MetricKernel) -> bool:
    t = np.linspace(-40.0, 40.0, 161)
    return bool(np.max(np.abs(k.log_weighted(t))) < 1e-12)


def _tri(v: PosDefVerdict) -> bool | None:
    return True if v.verdict == PD else (False if v.verdict == NPD else None)


def membership(k: MetricKernel, cfg: TestConfig = TestConfig()) -> MembershipResult:
    """Combine cp_test on ``k`` and on its dual into a K+/K- classification.

    The square-root kernel is the only kernel in both classes, so a definite
    K+ (or K-) verdict for any other kernel rules out the opposite class.
    """
    vp = cp_test(k, cfg)
    vm = cp_test(dual(k), cfg)
    plus, minus = _tri(vp), _tri(vm)
    is_sqrt = _is_sqrt_kernel(k)
    if not is_sqrt:
        if plus is True and minus is None:
            minus = False
        if minus is True and plus is None:
            plus = False
    if plus is True and minus is True:
        label = "both" if is_sqrt else "contradiction"
    elif plus is True:
        label = "in_K_plus"
    elif minus is True:
        label = "in_K_minus"
    elif plus is False and minus is False:
        label = "neither"
    else:
        label = "inconclusive"
    return MembershipResult(label, plus, minus, vp, vm)


def order_test(k1: MetricKernel, k2: MetricKernel, cfg: TestConfig = TestConfig()) -> PosDefVerdict:
    """k1 precedes k2 when k1(e^t)/k2(e^t) is positive definite."""
    f = kernel_ratio_function(k1, k2)
    v = fourier_test(f, cfg)
    v.detail["pair"] = [str(k1), str(k2)]
    if v.verdict == INCONCLUSIVE:
        g = gram_test(f, cfg)
        if g.verdict == NPD:
            g.detail.update(v.detail)
            return g
    return v


DEFAULT_POWERS = (1.0, 0.5, 0.25, 0.125)


def infdiv_test(h, powers: Sequence[float] = DEFAULT_POWERS, cfg: TestConfig = TestConfig()) -> list[PosDefVerdict]:
    """Fourier test of h^r for each requested power.

    One negative verdict refutes infinite divisibility; all-positive verdicts
    are evidence only.
    """
    f = as_even_function(h)
    terms = f.terms
    probe = f(np.linspace(-cfg.fourier_halfwidth, cfg.fourier_halfwidth, 4097))
    if np.any(probe <= 0):
        raise ValueError("h must be strictly positive to take real powers")
    out = []
    for r in powers:
        if not (0 < r <= 1):
            raise ValueError("powers must lie in (0, 1]")
        if terms is not None:
            fr = power_function(f, r, terms)
        elif f.analytic is not None:
            fr = _power_of_analytic(f, r)
        else:
            fr = power_function(f, r)
        v = fourier_test(fr, cfg)
        v.detail["power"] = r
        out.append(v)
    return out


def _power_of_analytic(f: EvenFunction, r: float) -> EvenFunction:
    """Powers of an analytic function whose values on the shifted line avoid the negative axis."""

    def fa(z):
        return np.exp(r * np.log(f.analytic(z)))

    return EvenFunction(lambda t: np.abs(f(t)) ** r, fa, f.strip, f"{f.label}^{r:g}")


# ---------------------------------------------------------------------------
# Critical parameter search

@dataclass
class CriticalResult:
    estimate: float
    positive_end: float
    negative_end: float
    evaluations: list[tuple[float, str]]
    converged: bool
    assumption: str

    @property
    def width(self) -> float:
        return abs(self.negative_end - self.positive_end)

    def to_dict(self) -> dict:
        return {
            "estimate": self.estimate,
            "positive_end": self.positive_end,
            "negative_end": self.negative_end,
            "width": self.width,
            "converged": self.converged,
            "assumption": self.assumption,
            "evaluations": [[p, v] for p, v in self.evaluations],
        }


def critical_search(
    family: Callable[[float], MetricKernel],
    lam_range: tuple[float, float],
    cfg: TestConfig = TestConfig(),
    width: float = 1e-3,
    override_monotonicity: bool = False,
    test: Callable[[MetricKernel, TestConfig], PosDefVerdict] = cp_test,
) -> CriticalResult:
    """Bisect on cp_test verdicts for the parameter where K+ membership switches.

    Only definite verdicts move the bracket ends, so under the caller's
    monotonicity assumption the returned bracket always contains the
    critical value.  Inconclusive midpoints are retried at nearby offsets;
    if those are inconclusive too the search stops unconverged.
    """
    lo, hi = map(float, lam_range)
    probe = family(lo)
    if probe.family == "hansen_bridge" and not override_monotonicity:
        raise ValueError(
            "membership of hansen_bridge is not known to be monotone in lam; "
            "pass override_monotonicity=True to assume it"
        )
    assumption = "monotone membership asserted by caller"
    if override_monotonicity:
        assumption = "monotone membership ASSUMED via override (not established)"
    evals: list[tuple[float, str]] = []

    def verdict_at(x: float) -> str:
        v = test(family(x), cfg).verdict
        evals.append((x, v))
        return v

    v_lo, v_hi = verdict_at(lo), verdict_at(hi)
    if v_lo == PD and v_hi == NPD:
        pos, neg = lo, hi
    elif v_lo == NPD and v_hi == PD:
        pos, neg = hi, lo
    else:
        raise ValueError(f"no certified crossing in [{lo}, {hi}]: verdicts {v_lo} / {v_hi}")

    converged = True
    while abs(neg - pos) > width:
        mid = 0.5 * (pos + neg)
        v = verdict_at(mid)
        if v == INCONCLUSIVE:
            moved = False
            for frac in (0.25, 0.75):
                x = pos + frac * (neg - pos)
                v2 = verdict_at(x)
                if v2 == PD:
                    pos, moved = x, True
                    break
                if v2 == NPD:
                    neg, moved = x, True
                    break
            if not moved:
                converged = False
                break
            continue
        if v == PD:
            pos = mid
        else:
            neg = mid
    return CriticalResult(0.5 * (pos + neg), pos, neg, evals, converged, assumption)


def with_tolerance(cfg: TestConfig, tol: float) -> TestConfig:
    return replace(cfg, tolerance=tol)
