"""Hermitian linear-algebra kernels used by the beamformers.

The generalized Rayleigh quotient ``v^H A v / v^H B v`` is maximized through
a Cholesky reduction ``B = L L^H`` so the reduced problem stays Hermitian.
"""
from __future__ import annotations

import numpy as np
import scipy.linalg as sla

__all__ = [
    "SingularMatrixError",
    "pd_solve",
    "principal_eigvec",
    "principal_eigvec_low_rank",
    "rank_one_rayleigh_max",
    "rayleigh_quotient",
    "fix_phase",
]


class SingularMatrixError(np.linalg.LinAlgError):
    """Raised when a matrix expected to be positive definite is not."""


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` so its largest-magnitude entry is real and positive."""
    i = int(np.argmax(np.abs(v)))
    if v[i] == 0:
        return v
    out = v * (abs(v[i]) / v[i])
    out[i] = abs(v[i])
    return out


def rayleigh_quotient(a, b, v) -> float:
    v = np.asarray(v)
    return float(np.vdot(v, a @ v).real / np.vdot(v, b @ v).real)


def _cholesky(m: np.ndarray) -> np.ndarray:
    try:
        return sla.cholesky(m, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"matrix is not positive definite: {exc}") from None


def pd_solve(m, b) -> np.ndarray:
    """Solve ``m x = b`` for Hermitian positive definite ``m``."""
    m = np.asarray(m)
    try:
        factor = sla.cho_factor(m, lower=True)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"matrix is not positive definite: {exc}") from None
    return sla.cho_solve(factor, np.asarray(b))


def principal_eigvec(a, b) -> np.ndarray:
    """Unit vector maximizing ``v^H a v / v^H b v``.

    Parameters
    ----------
    a : (N, N) Hermitian positive semidefinite array
    b : (N, N) Hermitian positive definite array

    Returns
    -------
    v : (N,) complex array with ``||v|| = 1`` and its largest entry real positive.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    low = _cholesky(b)
    # reduced matrix L^{-1} a L^{-H}
    x = sla.solve_triangular(low, a, lower=True)
    reduced = sla.solve_triangular(low, x.conj().T, lower=True)
    reduced = 0.5 * (reduced + reduced.conj().T)
    try:
        _, vecs = np.linalg.eigh(reduced)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(
            f"eigen-solver failed on {reduced.shape} reduced pencil: {exc}") from None
    v = sla.solve_triangular(low.conj().T, vecs[:, -1], lower=False)
    return fix_phase(v / np.linalg.norm(v))


def principal_eigvec_low_rank(u, alpha: float, f, beta: float, s: float) -> np.ndarray:
    """Principal generalized eigenvector of ``(u u^H + alpha I, beta f f^H + s I)``.

    Every eigenvector whose eigenvalue differs from ``alpha / s`` lies in
    ``span{u, f}``; the problem is reduced to that subspace and compared with
    the ``alpha / s`` eigenvalue carried by its orthogonal complement.
    Costs O(N).
    """
    u = np.asarray(u, dtype=complex)
    f = np.asarray(f, dtype=complex)
    n = u.size
    if s <= 0 or beta < 0 or alpha < 0:
        raise ValueError("need s > 0 and alpha, beta >= 0")
    cols = [c for c in (u, f) if np.linalg.norm(c) > 0]
    if cols:
        q, r = np.linalg.qr(np.column_stack(cols))
        keep = np.abs(np.diag(r)) > 1e-12 * np.abs(r).max()
        q = q[:, keep]
    else:
        q = np.zeros((n, 0), dtype=complex)

    best_val, best = -np.inf, None
    if q.shape[1]:
        qu, qf = q.conj().T @ u, q.conj().T @ f
        k = q.shape[1]
        ra = np.outer(qu, qu.conj()) + alpha * np.eye(k)
        rb = beta * np.outer(qf, qf.conj()) + s * np.eye(k)
        y = principal_eigvec(ra, rb)
        best_val, best = rayleigh_quotient(ra, rb, y), q @ y
    if n > q.shape[1] and alpha / s > best_val * (1 + 1e-14):
        # any direction orthogonal to span{u, f}
        e = np.zeros(n, dtype=complex)
        e[int(np.argmin(np.abs(q).sum(axis=1)))] = 1.0
        w = e - q @ (q.conj().T @ e)
        best = w
    return fix_phase(best / np.linalg.norm(best))


def rank_one_rayleigh_max(b, u) -> np.ndarray:
    """Maximizer of ``|u^H v|^2 / v^H b v``: the normalized ``b^{-1} u``.

    No phase convention is applied; the output keeps the phase of ``b^{-1} u``,
    so ``u^H v`` is real and positive.
    """
    u = np.asarray(u, dtype=complex)
    if not np.any(u):
        raise ValueError("u must be nonzero")
    v = pd_solve(b, u)
    return v / np.linalg.norm(v)
