"""Finite-dimensional splitting identities: telescoping sum and O(1/n) rate.

Matrices are plain complex ndarrays.  The matrix exponential delegates to
scipy's scaling-and-squaring Pade implementation behind a norm cap; the
operator 2-norm is estimated by power iteration to a fixed tolerance.
"""

from __future__ import annotations

import math

import numpy as np
import scipy.linalg

_NORM_TOL = 1e-10


def _as_square(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix entries must be finite")
    return A


def spectral_norm(M, tol: float = _NORM_TOL, max_iter: int = 10000) -> float:
    """Largest singular value via power iteration on M*M."""
    A = _as_square(M)
    d = A.shape[0]
    H = A.conj().T @ A
    v = np.ones(d, dtype=complex)
    v += 1e-3 * np.sin(np.arange(d) + 1.0)  # break symmetric ties
    v /= np.linalg.norm(v)
    lam_prev = 0.0
    lam = 0.0
    for _ in range(max_iter):
        w = H @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        lam = float(np.real(v.conj() @ (H @ v)))
        if abs(lam - lam_prev) <= tol * max(abs(lam), 1.0):
            break
        lam_prev = lam
    return math.sqrt(max(lam, 0.0))


def expm(M, norm_cap: float = 200.0) -> np.ndarray:
    """e^M by scaling and squaring; refuses norms beyond ``norm_cap``."""
    A = _as_square(M)
    nrm = spectral_norm(A)
    if nrm > norm_cap:
        raise OverflowError(f"matrix norm {nrm:.3g} exceeds cap {norm_cap:.3g}")
    return scipy.linalg.expm(A)


def telescoping_residual(A, B, tau: float, n: int) -> float:
    """Defect of the telescoping identity for the n-step splitting.

    With P = e^{-tau A/n} e^{-tau B/n} and E = e^{-tau (A+B)/n},
    P^n - e^{-tau(A+B)} equals sum_{k<n} P^{n-1-k} (P - E) E^k exactly;
    the returned spectral norm of the difference is pure roundoff.
    """
    A = _as_square(A)
    B = _as_square(B)
    if A.shape != B.shape:
        raise ValueError("A and B must share a dimension")
    if n < 1:
        raise ValueError("n must be >= 1")
    step = tau / n
    P = expm(-step * A) @ expm(-step * B)
    E = expm(-step * (A + B))
    lhs = np.linalg.matrix_power(P, n) - expm(-tau * (A + B))

    d = A.shape[0]
    eye = np.eye(d, dtype=complex)
    p_pows = [eye]
    e_pows = [eye]
    for _ in range(n - 1):
        p_pows.append(p_pows[-1] @ P)
        e_pows.append(e_pows[-1] @ E)
    mid = P - E
    rhs = np.zeros_like(P)
    for k in range(n):
        rhs += p_pows[n - 1 - k] @ mid @ e_pows[k]
    return spectral_norm(lhs - rhs)


def lie_error(A, B, tau: float, ns: list[int]) -> list[tuple[int, float]]:
    """Splitting error ||(e^{-tau A/n} e^{-tau B/n})^n - e^{-tau(A+B)}||_2."""
    A = _as_square(A)
    B = _as_square(B)
    if not ns:
        raise ValueError("ns must be non-empty")
    if any(a >= b for a, b in zip(ns, ns[1:])):
        raise ValueError("ns must be strictly increasing")
    target = expm(-tau * (A + B))
    out = []
    for n in ns:
        if n < 1:
            raise ValueError("n must be >= 1")
        step = tau / n
        P = expm(-step * A) @ expm(-step * B)
        out.append((n, spectral_norm(np.linalg.matrix_power(P, n) - target)))
    return out


def random_matrix_pair(dim: int, norm_bound: float, seed: int
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Seeded complex pair with spectral norms between 0.3 and 1 of the bound."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    if norm_bound <= 0.0:
        raise ValueError("norm_bound must be > 0")
    rng = np.random.default_rng(seed)

    def draw() -> np.ndarray:
        G = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        s = spectral_norm(G)
        return G * (norm_bound * rng.uniform(0.3, 1.0) / s)

    return draw(), draw()
