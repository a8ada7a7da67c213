"""Non-commutative multiplication maps built from a kernel and a positive base.

For a base ``D = U diag(w) U*`` and kernel ``k`` the map

    Omega(X) = U (Phi o (U* X U)) U*,   Phi[i, j] = k(w_i / w_j) / w_j,

is the kernel-weighted generalization of ``X -> D^{-1} X``.  The inverse map
multiplies entrywise by ``1 / Phi``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernels import MetricKernel, make_kernel
from .linalg_core import NumericalRejection, SpectralDecomposition, as_hermitian, eigh

EIG_FLOOR = 1e-12


def _positive_spectrum(d, name: str = "base") -> SpectralDecomposition:
    dec = eigh(d)
    if dec.eigenvalues[0] <= EIG_FLOOR:
        raise NumericalRejection(
            f"{name} is not strictly positive (min eigenvalue {dec.eigenvalues[0]:.3e} <= {EIG_FLOOR:g})"
        )
    return dec


def schur_kernel(k: MetricKernel, w: np.ndarray) -> np.ndarray:
    """Matrix with entries k(w_i / w_j) / w_j."""
    w = np.asarray(w, dtype=float)
    ratio = w[:, None] / w[None, :]
    return k(ratio) / w[None, :]


@dataclass(frozen=True)
class SuperoperatorHandle:
    """A kernel paired with a positive base, with its spectral data cached."""

    kernel: MetricKernel
    base: np.ndarray
    spectral: SpectralDecomposition
    schur: np.ndarray

    @property
    def dim(self) -> int:
        return self.base.shape[0]

    def _to_eigenbasis(self, x):
        u = self.spectral.unitary
        x = np.asarray(x, dtype=complex)
        if x.shape != (self.dim, self.dim):
            raise ValueError(f"argument has shape {x.shape}, expected {(self.dim, self.dim)}")
        return u.conj().T @ x @ u

    def _from_eigenbasis(self, y):
        u = self.spectral.unitary
        return u @ y @ u.conj().T

    def apply(self, x) -> np.ndarray:
        return self._from_eigenbasis(self.schur * self._to_eigenbasis(x))

    def apply_inverse(self, y) -> np.ndarray:
        return self._from_eigenbasis(self._to_eigenbasis(y) / self.schur)


def make_handle(k: MetricKernel, d) -> SuperoperatorHandle:
    base = as_hermitian(d, "base")
    dec = _positive_spectrum(base)
    return SuperoperatorHandle(k, base, dec, schur_kernel(k, dec.eigenvalues))


def apply_omega(h: SuperoperatorHandle, x) -> np.ndarray:
    return h.apply(as_hermitian(x, "X"))


def apply_omega_inverse(h: SuperoperatorHandle, y) -> np.ndarray:
    return h.apply_inverse(as_hermitian(y, "Y"))


def metric(k: MetricKernel, d, x, y) -> complex:
    """Riemannian inner product Tr X* Omega_D(Y)."""
    h = make_handle(k, d)
    x = as_hermitian(x, "X")
    return complex(np.vdot(x, h.apply(as_hermitian(y, "Y"))))


def quasi_entropy(k: MetricKernel, a, b, kmat=None) -> float:
    """Quasi-entropy with g(x) = (1-x)^2 k(x), evaluated in the eigenbases of A and B.

    With A = sum a_i P_i and B = sum b_j Q_j this is
    sum_ij g(a_i/b_j) b_j |<xi_i|K|eta_j>|^2.
    """
    da = _positive_spectrum(a, "A")
    db = _positive_spectrum(b, "B")
    n = da.eigenvalues.size
    kmat = np.eye(n, dtype=complex) if kmat is None else np.asarray(kmat, dtype=complex)
    if kmat.shape != (n, n):
        raise ValueError("K has the wrong shape")
    ai = da.eigenvalues[:, None]
    bj = db.eigenvalues[None, :]
    ratio = ai / bj
    g = (1.0 - ratio) ** 2 * k(ratio)
    overlap = np.abs(da.unitary.conj().T @ kmat @ db.unitary) ** 2
    return float(np.sum(g * bj * overlap))


def operator_mean_map(k: MetricKernel, a, b):
    """The map X -> M^k(A, B)(X) = R_B k(L_A R_B^{-1})^{-1} (X).

    In the eigenbases of A and B the map multiplies entry (i, j) by
    b_j / k(a_i / b_j).
    """
    da = _positive_spectrum(a, "A")
    db = _positive_spectrum(b, "B")
    ai = da.eigenvalues[:, None]
    bj = db.eigenvalues[None, :]
    mult = bj / k(ai / bj)
    ua, ub = da.unitary, db.unitary

    def apply(x):
        x = np.asarray(x, dtype=complex)
        return ua @ (mult * (ua.conj().T @ x @ ub)) @ ub.conj().T

    return apply


def operator_mean(k: MetricKernel, a, b, x=None) -> np.ndarray:
    """Operator mean M^k(A, B) applied to ``x`` (the identity by default)."""
    a = as_hermitian(a, "A")
    if x is None:
        x = np.eye(a.shape[0], dtype=complex)
    return operator_mean_map(k, a, b)(x)


BKM_KERNEL = make_kernel("wyd", p=1.0)


def bkm_quadrature(direction: str, d, x, n_nodes: int = 200) -> np.ndarray:
    """Integral forms of the BKM map and its inverse by Gauss-Legendre quadrature.

    ``forward`` integrates (D+t)^{-1} X (D+t)^{-1} over t in (0, inf) after the
    substitution t = g u / (1-u), with g the geometric mean of the spectrum.
    ``inverse`` integrates D^s X D^{1-s} over s in (0, 1).
    """
    if n_nodes < 16:
        raise ValueError("n_nodes must be >= 16")
    dec = _positive_spectrum(d, "D")
    w, u = dec.eigenvalues, dec.unitary
    y = u.conj().T @ as_hermitian(x, "X") @ u
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    un = 0.5 * (nodes + 1.0)
    uw = 0.5 * weights
    if direction == "forward":
        gm = float(np.exp(np.mean(np.log(w))))
        t = gm * un / (1.0 - un)
        jac = gm / (1.0 - un) ** 2
        inv = 1.0 / (w[None, :] + t[:, None])
        mult = np.einsum("q,qi,qj->ij", uw * jac, inv, inv)
    elif direction == "inverse":
        logw = np.log(w)
        ps = np.exp(un[:, None] * logw[None, :])
        qs = np.exp((1.0 - un)[:, None] * logw[None, :])
        mult = np.einsum("q,qi,qj->ij", uw, ps, qs)
    else:
        raise ValueError("direction must be 'forward' or 'inverse'")
    return u @ (mult * y) @ u.conj().T
