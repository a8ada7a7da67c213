"""Quantum channels in Kraus form, metric contraction audits and contraction coefficients."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh as generalized_eigh
from scipy.optimize import minimize

from .kernels import MetricKernel
from .linalg_core import NumericalRejection, as_hermitian, haar_unitary, rng_for, trace_norm
from .superop import EIG_FLOOR, make_handle, quasi_entropy

CPT_TOL = 1e-8
REGULARIZATION = 1e-10


@dataclass(frozen=True)
class QuantumChannel:
    """Completely positive trace-preserving map A -> sum_j F_j A F_j^*."""

    kraus: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def out_dim(self) -> int:
        return self.kraus[0].shape[0]

    def cpt_residual(self) -> float:
        s = sum(f.conj().T @ f for f in self.kraus)
        return float(np.max(np.abs(s - np.eye(self.dim))))

    def to_json(self) -> str:
        mats = [[[[float(z.real), float(z.imag)] for z in row] for row in f] for f in self.kraus]
        return json.dumps(mats)

    @classmethod
    def from_json(cls, s: str) -> "QuantumChannel":
        mats = json.loads(s)
        return make_channel([np.array([[complex(re, im) for re, im in row] for row in m]) for m in mats])


def make_channel(kraus) -> QuantumChannel:
    """Validate Kraus operators (square, equal size, at most d^2 of them, sum F*F = I within 1e-8)."""
    ops = tuple(np.asarray(f, dtype=complex) for f in kraus)
    if not ops:
        raise ValueError("at least one Kraus operator is required")
    shape = ops[0].shape
    if len(shape) != 2 or shape[0] != shape[1] or any(f.shape != shape for f in ops):
        raise ValueError("Kraus operators must be equally sized square matrices")
    if len(ops) > shape[0] ** 2:
        raise ValueError(f"at most d^2 = {shape[0] ** 2} Kraus operators are needed, got {len(ops)}")
    ch = QuantumChannel(ops)
    res = ch.cpt_residual()
    if res > CPT_TOL:
        raise ValueError(f"Kraus operators are not trace preserving (residual {res:.3e})")
    return ch


def identity_channel(d: int) -> QuantumChannel:
    return make_channel([np.eye(d)])


def depolarizing_channel(d: int) -> QuantumChannel:
    """Completely depolarizing map X -> Tr(X) I/d via Kraus operators |i><j|/sqrt(d)."""
    ops = []
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d))
            e[i, j] = 1.0 / math.sqrt(d)
            ops.append(e)
    return make_channel(ops)


def unitary_channel(u) -> QuantumChannel:
    return make_channel([np.asarray(u)])


def random_channel(d: int, env: int, seed: int) -> QuantumChannel:
    """Kraus operators as the blocks of a Haar-random isometry C^d -> C^d (x) C^env."""
    if d < 1 or env < 1:
        raise ValueError("d and env must be >= 1")
    if env > d * d:
        raise ValueError(f"env must be at most d^2 = {d * d}")
    rng = rng_for("random_channel", d, env, seed)
    u = haar_unitary(rng, d * env)
    v = u[:, :d]
    ops = [v[j * d:(j + 1) * d, :] for j in range(env)]
    return make_channel(ops)


def apply(channel: QuantumChannel, x, mode: str = "forward") -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.shape != (channel.dim, channel.dim):
        raise ValueError(f"argument shape {x.shape} does not match channel dimension {channel.dim}")
    if mode == "forward":
        return sum(f @ x @ f.conj().T for f in channel.kraus)
    if mode == "adjoint":
        return sum(f.conj().T @ x @ f for f in channel.kraus)
    raise ValueError("mode must be 'forward' or 'adjoint'")


# ---------------------------------------------------------------------------
# Matrix representation in an orthonormal Hermitian basis

def gell_mann_basis(d: int) -> np.ndarray:
    """Orthonormal Hermitian basis of M_d: I/sqrt(d) first, then the d^2-1 traceless generators."""
    basis = [np.eye(d, dtype=complex) / math.sqrt(d)]
    for j in range(d):
        for k in range(j + 1, d):
            s = np.zeros((d, d), dtype=complex)
            s[j, k] = s[k, j] = 1.0 / math.sqrt(2)
            basis.append(s)
            a = np.zeros((d, d), dtype=complex)
            a[j, k] = -1j / math.sqrt(2)
            a[k, j] = 1j / math.sqrt(2)
            basis.append(a)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        basis.append(np.diag(diag / math.sqrt(l * (l + 1))).astype(complex))
    return np.array(basis)


@dataclass(frozen=True)
class SuperopMatrix:
    """Real d^2 x d^2 matrix of a Hermiticity-preserving map in the Gell-Mann basis."""

    entries: np.ndarray
    basis: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def apply(self, x) -> np.ndarray:
        coeffs = np.einsum("kij,ji->k", self.basis, np.asarray(x, dtype=complex))
        out = self.entries @ coeffs
        return np.einsum("k,kij->ij", out, self.basis)


def superop_matrix(linear_map, d: int) -> SuperopMatrix:
    basis = gell_mann_basis(d)
    images = [linear_map(b) for b in basis]
    m = np.einsum("aij,bji->ab", basis, np.array(images))
    return SuperopMatrix(m.real if np.max(np.abs(m.imag)) < 1e-9 * max(1.0, np.max(np.abs(m))) else m, basis)


# ---------------------------------------------------------------------------
# Contraction of the monotone metrics

def _regularize(rho: np.ndarray) -> tuple[np.ndarray, bool]:
    d = rho.shape[0]
    if np.linalg.eigvalsh(rho)[0] > EIG_FLOOR:
        return rho, False
    return (1.0 - REGULARIZATION) * rho + REGULARIZATION * np.eye(d) / d, True


def contraction_audit(k: MetricKernel, channel: QuantumChannel, rho, x, rel_slack: float = 1e-10) -> dict:
    """Compare the metric of Phi(X) at Phi(rho) with the metric of X at rho."""
    rho = as_hermitian(rho, "rho")
    x = as_hermitian(x, "X")
    out_rho, regularized = _regularize(as_hermitian(apply(channel, rho), "Phi(rho)"))
    h_in = make_handle(k, rho)
    h_out = make_handle(k, out_rho)
    y = apply(channel, x)
    rhs = float(np.vdot(x, h_in.apply(x)).real)
    lhs = float(np.vdot(y, h_out.apply(y)).real)
    ok = lhs <= rhs + rel_slack * abs(rhs)
    return {"lhs": lhs, "rhs": rhs, "ok": bool(ok), "regularized": regularized}


def _traceless_block(m: np.ndarray) -> np.ndarray:
    return m[1:, 1:]


def eta_riem(k: MetricKernel, channel: QuantumChannel, rho) -> float:
    """Largest generalized eigenvalue of Phi^* Omega_{Phi(rho)} Phi against Omega_rho on traceless X.

    Solved by congruence with S = matrix of Omega_rho restricted to the
    traceless subspace: eigenvalues of S^{-1/2} M S^{-1/2}.
    """
    rho = as_hermitian(rho, "rho")
    d = rho.shape[0]
    out_rho, _ = _regularize(as_hermitian(apply(channel, rho), "Phi(rho)"))
    h_in = make_handle(k, rho)
    h_out = make_handle(k, out_rho)

    def upsilon(x):
        return apply(channel, h_out.apply(apply(channel, x)), "adjoint")

    s_mat = _traceless_block(superop_matrix(h_in.apply, d).entries).real
    m_mat = _traceless_block(superop_matrix(upsilon, d).entries).real
    s_mat = 0.5 * (s_mat + s_mat.T)
    m_mat = 0.5 * (m_mat + m_mat.T)
    w, v = np.linalg.eigh(s_mat)
    if w[0] <= 0:
        raise NumericalRejection("metric matrix is not positive definite on the traceless subspace")
    inv_sqrt = (v / np.sqrt(w)) @ v.T
    vals = np.linalg.eigvalsh(inv_sqrt @ m_mat @ inv_sqrt)
    return float(max(vals[-1], 0.0))


def eta_riem_generalized(k: MetricKernel, channel: QuantumChannel, rho) -> float:
    """Same quantity from scipy's symmetric-definite generalized eigensolver (cross-check)."""
    rho = as_hermitian(rho, "rho")
    d = rho.shape[0]
    out_rho, _ = _regularize(as_hermitian(apply(channel, rho), "Phi(rho)"))
    h_in = make_handle(k, rho)
    h_out = make_handle(k, out_rho)
    s_mat = _traceless_block(superop_matrix(h_in.apply, d).entries).real
    m_mat = _traceless_block(
        superop_matrix(lambda x: apply(channel, h_out.apply(apply(channel, x)), "adjoint"), d).entries
    ).real
    vals = generalized_eigh(0.5 * (m_mat + m_mat.T), 0.5 * (s_mat + s_mat.T), eigvals_only=True)
    return float(max(vals[-1], 0.0))


def _random_pure(rng: np.random.Generator, d: int) -> np.ndarray:
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def _dobrushin_objective(channel: QuantumChannel, params: np.ndarray, d: int) -> float:
    """Minus half the trace norm of Phi(psi psi* - phi phi*) for an orthonormalized pair."""
    a = params[:d] + 1j * params[d:2 * d]
    b = params[2 * d:3 * d] + 1j * params[3 * d:]
    na = np.linalg.norm(a)
    if na < 1e-12:
        return 0.0
    a = a / na
    b = b - np.vdot(a, b) * a
    nb = np.linalg.norm(b)
    if nb < 1e-12:
        return 0.0
    b = b / nb
    diff = np.outer(a, a.conj()) - np.outer(b, b.conj())
    return -0.5 * trace_norm(apply(channel, diff))


def _orthonormal_pair(params: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    a = params[:d] + 1j * params[d:2 * d]
    b = params[2 * d:3 * d] + 1j * params[3 * d:]
    a = a / np.linalg.norm(a)
    b = b - np.vdot(a, b) * a
    return a, b / np.linalg.norm(b)


def dobrushin_search(channel: QuantumChannel, starts: int = 50, seed: int = 0):
    """Multistart BFGS over orthogonal pure pairs; returns (value, (psi, phi)) for the best pair."""
    d = channel.dim
    if d == 1:
        return 0.0, None
    rng = rng_for("eta_dobrushin", d, seed)
    best, best_x = 0.0, None
    for _ in range(starts):
        x0 = rng.standard_normal(4 * d)
        res = minimize(lambda p: _dobrushin_objective(channel, p, d), x0, method="BFGS",
                       options={"maxiter": 200, "gtol": 1e-10})
        for val, x in ((-float(res.fun), res.x), (-_dobrushin_objective(channel, x0, d), x0)):
            if val > best:
                best, best_x = val, x
    pair = None if best_x is None else _orthonormal_pair(best_x, d)
    return min(best, 1.0), pair


def eta_dobrushin_lower(channel: QuantumChannel, starts: int = 50, seed: int = 0) -> float:
    """Lower bound on the trace-norm contraction coefficient over orthogonal pure pairs."""
    return dobrushin_search(channel, starts, seed)[0]


def eta_relent_lower(k: MetricKernel, channel: QuantumChannel, samples: int, seed: int = 0) -> float:
    """Largest sampled ratio of quasi-entropies H(Phi rho, Phi gamma) / H(rho, gamma)."""
    d = channel.dim
    rng = rng_for("eta_relent", d, seed)
    best = 0.0
    for _ in range(samples):
        rho = _sample_density(rng, d)
        gamma = _sample_density(rng, d)
        den = quasi_entropy(k, rho, gamma)
        if den <= 1e-14:
            continue
        a, _ = _regularize(as_hermitian(apply(channel, rho)))
        b, _ = _regularize(as_hermitian(apply(channel, gamma)))
        best = max(best, quasi_entropy(k, a, b) / den)
    return best


def _sample_density(rng: np.random.Generator, d: int) -> np.ndarray:
    g = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    m = g @ g.conj().T + 1e-3 * np.eye(d)
    m = 0.5 * (m + m.conj().T)
    return m / np.trace(m).real


PAIR_MIXING = (1e-2, 1e-4, 1e-6, 1e-8)


def eta_riem_sup(k: MetricKernel, channel: QuantumChannel, samples: int, seed: int = 0, pair=None) -> float:
    """Maximum of eta_riem over sampled base points (a lower bound on the supremum).

    The supremum is typically approached at the boundary of the state space,
    so when an extremal pure pair (psi, phi) from the trace-norm search is
    given, the states (psi psi* + phi phi*)/2 mixed with a vanishing amount
    of I/d are added to the random samples.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    d = channel.dim
    rng = rng_for("eta_riem", d, seed)
    candidates = [_sample_density(rng, d) for _ in range(samples)]
    if pair is not None:
        a, b = pair
        mid = 0.5 * (np.outer(a, a.conj()) + np.outer(b, b.conj()))
        candidates += [(1.0 - eps) * mid + eps * np.eye(d) / d for eps in PAIR_MIXING]
    return max(eta_riem(k, channel, rho) for rho in candidates)


def eta_estimates(k: MetricKernel, channel: QuantumChannel, samples: int, seed: int = 0,
                  dobrushin_starts: int = 50) -> dict:
    """Sampled estimates of the three contraction coefficients, all lower bounds on the suprema."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    dob, pair = dobrushin_search(channel, dobrushin_starts, seed)
    return {
        "eta_riem_sup": eta_riem_sup(k, channel, samples, seed, pair),
        "eta_dob_lower": dob,
        "eta_relent_lower": eta_relent_lower(k, channel, samples, seed),
    }


def upsilon_positivity_probe(k: MetricKernel, channel: QuantumChannel, rho, trials: int = 200,
                             seed: int = 0) -> float:
    """Smallest eigenvalue of Omega_rho^{-1} Phi^* Omega_{Phi(rho)} (P) over random pure states P.

    A negative value shows this composite map is not positivity preserving for
    the given (k, Phi, rho).  Nonnegative values are evidence only.
    """
    rho = as_hermitian(rho, "rho")
    d = rho.shape[0]
    out_rho, _ = _regularize(as_hermitian(apply(channel, rho)))
    h_in = make_handle(k, rho)
    h_out = make_handle(k, out_rho)
    rng = rng_for("upsilon_probe", d, seed)
    worst = math.inf
    for _ in range(trials):
        v = _random_pure(rng, d)
        y = h_in.apply_inverse(apply(channel, h_out.apply(np.outer(v, v.conj())), "adjoint"))
        worst = min(worst, float(np.linalg.eigvalsh(0.5 * (y + y.conj().T))[0]))
    return worst
