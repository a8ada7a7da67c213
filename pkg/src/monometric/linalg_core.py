"""Dense Hermitian linear algebra helpers shared by the rest of the package."""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

HERMITIAN_REJECT_TOL = 1e-8

RNG_STREAM_VERSION = 1
_KINDS = ("density", "hermitian_traceless", "unitary")


class NumericalRejection(ValueError):
    """Raised when an input is outside the numerically admissible domain."""


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues in ascending order and the unitary whose columns are eigenvectors."""

    eigenvalues: np.ndarray
    unitary: np.ndarray

    def reconstruct(self) -> np.ndarray:
        u = self.unitary
        return (u * self.eigenvalues) @ u.conj().T


def as_hermitian(h, name: str = "matrix") -> np.ndarray:
    """Return the symmetrized part of ``h``, rejecting clearly non-Hermitian input."""
    a = np.asarray(h, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    if a.shape[0] == 0:
        raise ValueError(f"{name} must have positive dimension")
    if not np.all(np.isfinite(a)):
        raise NumericalRejection(f"{name} has non-finite entries")
    asym = np.max(np.abs(a - a.conj().T))
    scale = max(1.0, np.max(np.abs(a)))
    if asym > HERMITIAN_REJECT_TOL * scale:
        raise ValueError(f"{name} is not Hermitian (asymmetry {asym:.3e})")
    return 0.5 * (a + a.conj().T)


def eigh(h) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix with ascending eigenvalues."""
    a = as_hermitian(h)
    w, u = np.linalg.eigh(a)
    return SpectralDecomposition(eigenvalues=w, unitary=u)


def schur_product(a, b) -> np.ndarray:
    """Entrywise (Hadamard) product of two equally shaped matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return a * b


def min_eigenvalue(h) -> float:
    return float(np.linalg.eigvalsh(as_hermitian(h))[0])


def trace_norm(x) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(as_hermitian(x)))))


def matrix_function(h, func) -> np.ndarray:
    """Apply a scalar function through the spectral calculus."""
    dec = eigh(h)
    return (dec.unitary * func(dec.eigenvalues)) @ dec.unitary.conj().T


def is_density(rho, tol: float = 1e-10) -> bool:
    try:
        a = as_hermitian(rho)
    except ValueError:
        return False
    w = np.linalg.eigvalsh(a)
    return bool(w[0] >= -tol and abs(np.trace(a).real - 1.0) <= tol)


def rng_for(*key) -> np.random.Generator:
    """Counter-based Philox stream keyed by arbitrary ints and strings.

    Strings are hashed with CRC32 so the stream is identical across platforms
    and interpreter runs (unlike the salted builtin ``hash``).
    """
    words = [RNG_STREAM_VERSION]
    for k in key:
        if isinstance(k, str):
            words.append(zlib.crc32(k.encode()))
        else:
            words.append(int(k) & 0xFFFFFFFFFFFFFFFF)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


def ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def haar_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng, dim, dim))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_sample(kind: str, dim: int, seed: int) -> np.ndarray:
    """Deterministic random matrix drawn from the named ensemble.

    ``density`` draws from the Hilbert-Schmidt ensemble, ``hermitian_traceless``
    from the GUE with the trace removed, and ``unitary`` from Haar measure.
    """
    if kind not in _KINDS:
        raise ValueError(f"unknown kind {kind!r}; expected one of {_KINDS}")
    if int(dim) < 1:
        raise ValueError("dim must be >= 1")
    dim = int(dim)
    rng = rng_for("random_sample", kind, dim, seed)
    if kind == "density":
        g = ginibre(rng, dim, dim)
        m = g @ g.conj().T
        m = 0.5 * (m + m.conj().T)
        return m / np.trace(m).real
    if kind == "hermitian_traceless":
        g = ginibre(rng, dim, dim)
        h = 0.5 * (g + g.conj().T)
        return h - (np.trace(h).real / dim) * np.eye(dim)
    return haar_unitary(rng, dim)


def random_density_with_condition(rng: np.random.Generator, dim: int, cond: float) -> np.ndarray:
    """Density matrix in a Haar basis with log-uniform spectrum spanning ``cond``."""
    if dim == 1:
        return np.ones((1, 1), dtype=complex)
    w = np.exp(np.linspace(0.0, np.log(cond), dim))
    w = rng.permutation(w)
    w /= w.sum()
    u = haar_unitary(rng, dim)
    rho = (u * w) @ u.conj().T
    return 0.5 * (rho + rho.conj().T)
