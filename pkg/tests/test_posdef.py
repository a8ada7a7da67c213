import math

import mpmath as mp
import numpy as np
import pytest

from monometric.kernels import catalog_samples, dual, make_kernel
from monometric.linalg_core import random_sample
from monometric.posdef import (
    INCONCLUSIVE,
    NPD,
    PD,
    EvenFunction,
    TestConfig,
    cp_test,
    critical_search,
    fourier_test,
    gram_test,
    infdiv_test,
    kernel_weighted_function,
    membership,
    order_test,
    shifted_transform,
    verify_gram_witness,
)
from monometric.superop import schur_kernel

FAST = TestConfig(gram_trials=40)


def test_fourier_gaussian_is_pd():
    v = fourier_test(lambda t: np.exp(-t * t))
    assert v.verdict == PD and v.margin >= 0


def test_fourier_sech_is_pd():
    assert fourier_test(lambda t: 1 / np.cosh(t)).verdict == PD


def test_indicator_is_not_pd():
    v = fourier_test(lambda t: (np.abs(t) <= 1.0).astype(float))
    assert v.verdict == NPD and v.margin < 0
    assert v.witness["kind"] == "frequency"


def test_unbounded_function_short_circuits():
    v = fourier_test(lambda t: np.cosh(t))
    assert v.verdict == NPD and v.witness["kind"] in ("unbounded", "gram")


def test_constant_limit_is_handled():
    v = fourier_test(lambda t: 0.5 + 0.5 * np.exp(-t * t))
    assert v.verdict == PD


def test_gram_never_certifies():
    v = gram_test(lambda t: np.exp(-t * t), FAST)
    assert v.verdict == INCONCLUSIVE
    assert v.margin >= -1e-9


def test_gram_finds_violation_and_witness_replays():
    h = lambda t: np.maximum(1 - np.abs(t), 0.0) - 0.6 * np.exp(-((np.abs(t) - 2.0) ** 2))  # noqa: E731
    v = gram_test(h, TestConfig(gram_trials=200, point_scale=6.0))
    assert v.verdict == NPD
    assert verify_gram_witness(h, v.witness) == pytest.approx(v.witness["min_eigenvalue"], rel=1e-10)


def test_rejects_odd_or_bad_functions():
    with pytest.raises(ValueError):
        fourier_test(lambda t: np.exp(-t * t) + 0.1 * t)
    with pytest.raises(ValueError):
        fourier_test(lambda t: -np.exp(-t * t))


def test_config_validation():
    with pytest.raises(ValueError):
        TestConfig(tolerance=0.0)
    with pytest.raises(ValueError):
        TestConfig(shift_fraction=1.0)
    with pytest.raises(ValueError):
        TestConfig.from_dict({"nope": 1})
    assert TestConfig.from_dict({"seed": 3}).seed == 3


@pytest.mark.parametrize(
    "family,params,expected",
    [
        ("extreme", {"nu": 1.0}, PD),
        ("heinz", {"alpha": 0.3}, PD),
        ("wyd", {"p": 0.5}, PD),
        ("binomial", {"alpha": 0.5}, PD),
        ("extreme", {"nu": 0.0}, NPD),
        ("extreme", {"nu": 0.3}, NPD),
        ("convex_combo", {"nu": 0.25, "lam": 0.4}, PD),
        ("convex_combo", {"nu": 0.25, "lam": 0.5}, NPD),
        ("heron", {"nu": 0.5, "lam": 0.5}, NPD),
        ("geometric_bridge", {"mu": 1.0, "nu": 0.0, "lam": 0.5}, PD),
    ],
)
def test_cp_test_examples(family, params, expected):
    assert cp_test(make_kernel(family, params), FAST).verdict == expected


def test_sqrt_kernel_is_in_both_classes():
    k = make_kernel("heinz", alpha=0.5)
    assert cp_test(k, FAST).verdict == PD
    assert cp_test(dual(k), FAST).verdict == PD
    assert membership(k, FAST).label == "both"


@pytest.mark.parametrize(
    "family,params,label",
    [
        ("extreme", {"nu": 1.0}, "in_K_plus"),
        ("extreme", {"nu": 0.0}, "in_K_minus"),
        ("wyd", {"p": 1.7}, "in_K_minus"),
        ("extreme", {"nu": 0.3}, "neither"),
        ("heron", {"nu": 0.5, "lam": 0.5}, "neither"),
    ],
)
def test_membership_examples(family, params, label):
    assert membership(make_kernel(family, params), FAST).label == label


def test_order_examples():
    assert order_test(make_kernel("heinz", alpha=0.1), make_kernel("heinz", alpha=0.4), FAST).verdict == PD
    assert order_test(make_kernel("heinz", alpha=0.4), make_kernel("heinz", alpha=0.1), FAST).verdict == NPD
    assert order_test(make_kernel("binomial", alpha=0.8), make_kernel("binomial", alpha=0.2), FAST).verdict == PD
    assert order_test(make_kernel("extreme", nu=0.5), make_kernel("extreme", nu=0.0), FAST).verdict == NPD


def test_order_pd_algebraic_tail_never_refuted():
    # the ratio for power_difference(2) over (1) decays like 1/t, which the engine cannot certify,
    # but it must never be wrongly refuted
    v = order_test(make_kernel("power_difference", alpha=2.0), make_kernel("power_difference", alpha=1.0), FAST)
    assert v.verdict in (PD, INCONCLUSIVE)


def test_infdiv():
    vs = infdiv_test(lambda t: 1 / np.cosh(t))
    assert [v.verdict for v in vs] == [PD] * 4
    h = kernel_weighted_function(make_kernel("convex_combo", nu=0.25, lam=0.44))
    vs = infdiv_test(h, powers=(1.0, 0.25))
    assert vs[0].verdict == PD
    assert vs[1].verdict == NPD
    with pytest.raises(ValueError):
        infdiv_test(lambda t: np.exp(-t * t) - 0.5)


def test_critical_search_convex_combo():
    family = lambda lam: make_kernel("convex_combo", nu=0.25, lam=lam)  # noqa: E731
    r = critical_search(family, (0.1, 0.9), FAST, width=1e-3)
    assert r.converged
    assert r.positive_end <= 4 / 9 <= r.negative_end
    assert abs(r.estimate - 4 / 9) <= 1e-3


def test_critical_search_errors():
    family = lambda lam: make_kernel("convex_combo", nu=0.25, lam=lam)  # noqa: E731
    with pytest.raises(ValueError, match="no certified crossing"):
        critical_search(family, (0.1, 0.3), FAST)
    with pytest.raises(ValueError, match="override"):
        critical_search(lambda lam: make_kernel("hansen_bridge", lam=lam), (0.2, 0.8), FAST)


def test_frequency_witness_replays_independently():
    k = make_kernel("geometric_bridge", mu=1.0, nu=0.5, lam=0.31)
    v = cp_test(k)
    assert v.verdict == NPD
    w = v.witness
    assert w["kind"] == "frequency" and w["shift"] > 0
    f = kernel_weighted_function(k)
    assert shifted_transform(f, w["s"], w["shift"]) == pytest.approx(w["shifted_value"], rel=1e-8)
    real_line = shifted_transform(f, w["s"], 0.0)
    assert real_line == pytest.approx(w["transform_value"], rel=1e-5)
    assert w["transform_value"] < w["threshold"]


def test_frequency_witness_against_mpmath():
    # frozen high-precision value of the real-line transform at the reported frequency
    mp.mp.dps = 30
    nu, lam, s = mp.mpf("0.5"), mp.mpf("0.31"), mp.mpf("6.086835766330224")

    def ext(n, x):
        return (1 + n) ** 2 / 2 * (1 + x) / ((x + n) * (1 + n * x))

    def h(t):
        x = mp.e**t
        return mp.e ** (t / 2) * ext(1, x) ** (1 - lam) * ext(nu, x) ** lam

    value = 2 * mp.quadosc(lambda t: h(t) * mp.cos(s * t), [0, mp.inf], omega=s)
    assert float(value) == pytest.approx(-1.6412494925e-9, rel=1e-9)
    w = cp_test(make_kernel("geometric_bridge", mu=1.0, nu=0.5, lam=0.31)).witness
    assert w["transform_value"] == pytest.approx(float(value), rel=1e-8)


@pytest.mark.parametrize("k", catalog_samples(), ids=str)
def test_verdict_margin_consistency(k):
    v = cp_test(k, FAST)
    if v.verdict == PD:
        assert v.margin >= 0
    elif v.verdict == NPD:
        assert v.margin < 0 and v.witness is not None
    assert set(v.to_dict()) == {"verdict", "margin", "method", "witness"}


@pytest.mark.parametrize("k", [kk for kk in catalog_samples() if kk.family in ("heinz", "extreme", "wyd", "binomial")], ids=str)
def test_plus_members_give_psd_schur_matrices(k):
    # a K+ kernel makes [sqrt(w_i/w_j) k(w_i/w_j)] positive semidefinite for any positive w
    if cp_test(k, FAST).verdict != PD:
        pytest.skip("not certified in K+")
    for seed in range(20):
        w = np.linalg.eigvalsh(random_sample("density", 6, seed))
        m = schur_kernel(k, w) * w[None, :]
        sym = m * np.sqrt(w[:, None] / w[None, :])
        assert np.linalg.eigvalsh(0.5 * (sym + sym.T))[0] >= -1e-10 * np.abs(sym).max()


def test_analytic_extension_is_used():
    f = kernel_weighted_function(make_kernel("heinz", alpha=0.25))
    assert isinstance(f, EvenFunction) and f.analytic is not None
    v = fourier_test(f)
    assert v.detail["shift"] > 0
    assert math.isfinite(v.detail["tail_bound"])
