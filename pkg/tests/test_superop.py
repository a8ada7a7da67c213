import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from monometric.kernels import catalog_samples, dual, make_kernel
from monometric.linalg_core import NumericalRejection, random_sample
from monometric.superop import (
    BKM_KERNEL,
    apply_omega,
    apply_omega_inverse,
    bkm_quadrature,
    make_handle,
    metric,
    operator_mean,
    quasi_entropy,
    schur_kernel,
)

KERNELS = catalog_samples()


def test_schur_kernel_example():
    k = make_kernel("extreme", nu=1.0)
    assert np.allclose(schur_kernel(k, np.array([1.0, 2.0])), [[1.0, 2 / 3], [2 / 3, 0.5]])


def test_commuting_base_is_division():
    # on a base commuting with X every kernel reduces to D^{-1} X
    d = np.diag([0.2, 0.5, 1.3])
    x = np.diag([1.0, -2.0, 0.5])
    for k in KERNELS:
        assert np.allclose(apply_omega(make_handle(k, d), x), np.linalg.solve(d, x), atol=1e-12)


def test_identity_base_is_identity_map():
    x = random_sample("hermitian_traceless", 3, 2)
    for k in KERNELS:
        assert np.allclose(apply_omega(make_handle(k, np.eye(3)), x), x, atol=1e-13)


def test_rejects_singular_base():
    with pytest.raises(NumericalRejection):
        make_handle(make_kernel("heinz", alpha=0.5), np.diag([1.0, 0.0]))
    with pytest.raises(ValueError):
        make_handle(make_kernel("heinz", alpha=0.5), np.ones((2, 3)))


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(KERNELS), st.integers(2, 6), st.integers(0, 10**6))
def test_round_trip_and_duality(k, d, seed):
    rho = random_sample("density", d, seed)
    x = random_sample("hermitian_traceless", d, seed + 1)
    h = make_handle(k, rho)
    y = apply_omega(h, x)
    assert np.allclose(apply_omega_inverse(h, y), x, atol=1e-9 * np.abs(x).max())
    # the dual kernel on the inverse base gives the inverse map
    hd = make_handle(dual(k), np.linalg.inv(rho))
    assert np.allclose(apply_omega(hd, x), apply_omega_inverse(h, x), rtol=1e-8, atol=1e-10)
    assert np.allclose(y, y.conj().T, atol=1e-9 * np.abs(y).max())


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(KERNELS), st.integers(2, 5), st.integers(0, 10**6))
def test_metric_is_symmetric_and_positive(k, d, seed):
    rho = random_sample("density", d, seed)
    x = random_sample("hermitian_traceless", d, seed + 1)
    y = random_sample("hermitian_traceless", d, seed + 2)
    gxy = metric(k, rho, x, y)
    gyx = metric(k, rho, y, x)
    assert abs(gxy.imag) <= 1e-9 * abs(gxy)
    assert gxy.real == pytest.approx(gyx.real, rel=1e-9, abs=1e-12)
    assert metric(k, rho, x, x).real >= -1e-12


def test_metric_ordering_between_extremes():
    # kernels lie between the minimal 2/(1+x) and maximal (1+x)/(2x)
    rho = random_sample("density", 4, 3)
    x = random_sample("hermitian_traceless", 4, 4)
    lo = metric(make_kernel("extreme", nu=1.0), rho, x, x).real
    hi = metric(make_kernel("extreme", nu=0.0), rho, x, x).real
    for k in KERNELS:
        v = metric(k, rho, x, x).real
        assert lo * (1 - 1e-10) <= v <= hi * (1 + 1e-10)


def test_quasi_entropy_commuting_example():
    k = make_kernel("heinz", alpha=0.5)
    a, b = np.diag([0.25, 0.75]), np.diag([0.5, 0.5])
    expected = sum(bj * (1 - ai / bj) ** 2 * 2 / ((ai / bj) ** 0.5 + (ai / bj) ** 0.5) for ai, bj in ((0.25, 0.5), (0.75, 0.5)))
    assert quasi_entropy(k, a, b) == pytest.approx(expected, rel=1e-12)
    assert quasi_entropy(k, a, a) == pytest.approx(0.0, abs=1e-15)


@pytest.mark.parametrize("k", KERNELS, ids=str)
def test_quasi_entropy_symmetry(k):
    # x k(x) = k(1/x) makes the divergence symmetric in its arguments
    for seed in range(5):
        a = random_sample("density", 3, seed)
        b = random_sample("density", 3, seed + 50)
        assert quasi_entropy(k, a, b) == pytest.approx(quasi_entropy(k, b, a), rel=1e-9)


def test_quasi_entropy_monotone_under_partial_trace():
    k = make_kernel("wyd", p=0.5)
    for seed in range(10):
        a = random_sample("density", 4, seed)
        b = random_sample("density", 4, seed + 100)

        def ptrace(m):
            return np.einsum("ijkj->ik", m.reshape(2, 2, 2, 2))

        assert quasi_entropy(k, ptrace(a), ptrace(b)) <= quasi_entropy(k, a, b) + 1e-12


def test_operator_mean_examples():
    a, b = np.diag([1.0, 4.0]), np.diag([9.0, 1.0])
    geo = operator_mean(make_kernel("heinz", alpha=0.5), a, b)
    assert np.allclose(geo, np.diag([3.0, 2.0]))
    # the largest kernel gives the smallest mean
    harm = operator_mean(make_kernel("extreme", nu=0.0), a, b)
    assert np.allclose(harm, np.diag([1.8, 1.6]))
    arith = operator_mean(make_kernel("extreme", nu=1.0), a, b)
    assert np.allclose(arith, np.diag([5.0, 2.5]))


@pytest.mark.parametrize("seed", range(10))
def test_bkm_quadrature_matches_kernel(seed):
    d = 2 + seed % 5
    rho = random_sample("density", d, seed)
    x = random_sample("hermitian_traceless", d, seed + 7)
    h = make_handle(BKM_KERNEL, rho)
    fwd = bkm_quadrature("forward", rho, x)
    inv = bkm_quadrature("inverse", rho, x)
    scale = np.abs(x).max()
    cond = np.linalg.cond(rho)
    if cond <= 1e4:
        assert np.allclose(fwd, apply_omega(h, x), atol=1e-6 * np.abs(fwd).max())
        assert np.allclose(inv, apply_omega_inverse(h, x), atol=1e-6 * scale)


def test_bkm_quadrature_rejects_bad_input():
    with pytest.raises(ValueError):
        bkm_quadrature("sideways", np.eye(2), np.eye(2))
    with pytest.raises(ValueError):
        bkm_quadrature("forward", np.eye(2), np.eye(2), n_nodes=4)
