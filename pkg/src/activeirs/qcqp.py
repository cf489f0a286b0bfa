"""Dinkelbach fractional programming with an exact single-constraint QCQP inner solver.

Maximizes ``p^H A p / p^H B p`` subject to ``p^H C p <= P_I``. Each Dinkelbach
step linearizes the convex numerator around the current iterate and solves

    max_p  2 Re(p^H a) - y p^H B p    s.t.  p^H C p <= P_I

in closed form: ``p(mu) = (y B + mu C)^{-1} a`` with the multiplier ``mu >= 0``
found by bisection on the constraint.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.linalg as sla

from .spectral import SingularMatrixError

__all__ = [
    "FPMatrices",
    "ConstraintPencil",
    "QCQPInfo",
    "DinkelbachStep",
    "DegenerateRatioError",
    "BracketError",
    "solve_concave_qcqp",
    "dinkelbach",
    "write_trace_csv",
]


class DegenerateRatioError(ValueError):
    pass


class BracketError(ArithmeticError):
    pass


def _hermitian(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class FPMatrices:
    """``A`` (PSD numerator), ``B`` (PD denominator), ``C`` (PD constraint) and the budget."""

    a_mat: np.ndarray
    b_mat: np.ndarray
    c_mat: np.ndarray
    p_budget: float

    def __post_init__(self):
        for name in ("a_mat", "b_mat", "c_mat"):
            object.__setattr__(self, name, _hermitian(getattr(self, name)))
        if not self.p_budget > 0:
            raise ValueError("p_budget must be > 0")

    def z(self, p) -> float:
        return float(np.vdot(p, self.a_mat @ p).real)

    def w(self, p) -> float:
        return float(np.vdot(p, self.b_mat @ p).real)

    def ratio(self, p) -> float:
        w = self.w(p)
        if not w > 0:
            raise DegenerateRatioError("denominator p^H B p vanished")
        return self.z(p) / w

    def constraint(self, p) -> float:
        return float(np.vdot(p, self.c_mat @ p).real)


class ConstraintPencil:
    """Simultaneous diagonalization of the pair ``(B, C)``.

    With ``C = L L^H`` and ``L^{-1} B L^{-H} = Q diag(w) Q^H``, the transform
    ``T = L^{-H} Q`` gives ``T^H C T = I`` and ``T^H B T = diag(w)``, so every
    ``(y B + mu C)^{-1}`` becomes a diagonal scaling in the ``T`` basis.
    """

    def __init__(self, b_mat, c_mat):
        b_mat, c_mat = _hermitian(b_mat), _hermitian(c_mat)
        try:
            low = sla.cholesky(c_mat, lower=True)
        except np.linalg.LinAlgError as exc:
            raise SingularMatrixError(f"constraint matrix is not PD: {exc}") from None
        x = sla.solve_triangular(low, b_mat, lower=True)
        red = sla.solve_triangular(low, x.conj().T, lower=True)
        red = 0.5 * (red + red.conj().T)
        w, q = np.linalg.eigh(red)
        if not w[0] > 0:
            raise SingularMatrixError("denominator matrix is not PD")
        self.w = w
        self.t = sla.solve_triangular(low.conj().T, q, lower=False)

    def coords(self, a_vec) -> np.ndarray:
        return self.t.conj().T @ a_vec

    def vector(self, coords, y, mu) -> np.ndarray:
        return self.t @ (coords / (y * self.w + mu))

    def constraint(self, coords, y, mu) -> float:
        return float(np.sum(np.abs(coords) ** 2 / (y * self.w + mu) ** 2))


class QCQPInfo(NamedTuple):
    mu: float
    boundary: bool
    constraint_residual: float  # p^H C p - P_I
    gradient_norm: float        # ||2 (a - y B p)||, meaningful when interior
    bisections: int
    a_norm: float


def solve_concave_qcqp(a_vec, y, b_mat, c_mat, p_budget, tol=1e-9, *,
                       pencil: ConstraintPencil | None = None, full_output=False,
                       max_bisect=500):
    """Global maximizer of ``2 Re(p^H a_vec) - y p^H B p`` over ``p^H C p <= p_budget``.

    Parameters
    ----------
    a_vec : (N,) complex array
    y : float
        Positive weight of the quadratic penalty.
    b_mat, c_mat : (N, N) Hermitian positive definite arrays
    p_budget : float
    tol : float
        Relative tolerance on the active constraint, ``|p^H C p - P| <= tol * P``.
    pencil : ConstraintPencil, optional
        Precomputed factorization of ``(b_mat, c_mat)``; reused across calls.
    full_output : bool
        Also return a :class:`QCQPInfo`.
    """
    if not y > 0:
        raise ValueError(f"y must be > 0, got {y}")
    a_vec = np.asarray(a_vec, dtype=complex)
    if pencil is None:
        pencil = ConstraintPencil(b_mat, c_mat)
    b_mat = _hermitian(b_mat)
    coords = pencil.coords(a_vec)

    def finish(p, mu, boundary, nb):
        if not full_output:
            return p
        grad = 2.0 * np.linalg.norm(a_vec - y * (b_mat @ p))
        res = float(np.vdot(p, np.asarray(c_mat) @ p).real) - p_budget
        return p, QCQPInfo(mu, boundary, res, float(grad), nb, float(np.linalg.norm(a_vec)))

    if pencil.constraint(coords, y, 0.0) <= p_budget:
        return finish(pencil.vector(coords, y, 0.0), 0.0, False, 0)

    lo = 0.0
    hi = np.sqrt(np.sum(np.abs(coords) ** 2) / p_budget)
    while pencil.constraint(coords, y, hi) > p_budget:
        hi *= 2.0
        if not np.isfinite(hi):
            raise BracketError("could not bracket the constraint multiplier")
    nb = 0
    for nb in range(1, max_bisect + 1):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        val = pencil.constraint(coords, y, mid)
        if val > p_budget:
            lo = mid
        else:
            hi = mid
            # half the tolerance leaves room for round-off in the recomputed residual
            if p_budget - val <= 0.5 * tol * p_budget:
                break
    # hi is always feasible
    return finish(pencil.vector(coords, y, hi), float(hi), True, nb)


class DinkelbachStep(NamedTuple):
    t: int
    y: float                    # ratio weight used to produce p[t]
    objective: float            # ratio z(p)/w(p) at the iterate p[t]
    constraint_residual: float  # p^H C p - P_I at p[t]
    qcqp: QCQPInfo | None       # inner solve that produced p[t]; None at t = 0


def dinkelbach(fp: FPMatrices, p0, tol_inner=1e-4, max_iter=100, *,
               refresh=True, qcqp_tol=1e-9):
    """Maximize ``z(p)/w(p)`` from a feasible start ``p0``.

    Stops when ``||p[t+1] - p[t]|| <= tol_inner * ||p[t]||`` or after
    ``max_iter`` inner solves. With ``refresh=False`` the linearization point
    stays at ``p0`` for every step.

    Returns
    -------
    p : (N,) complex array
    trace : list of DinkelbachStep, one per iterate including ``p0``
    """
    p = np.asarray(p0, dtype=complex)
    if not np.any(p):
        raise DegenerateRatioError("p0 = 0 gives an undefined ratio")
    c0 = fp.constraint(p)
    if c0 > fp.p_budget * (1 + 1e-9):
        raise ValueError(f"p0 infeasible: p^H C p = {c0} > {fp.p_budget}")
    pencil = ConstraintPencil(fp.b_mat, fp.c_mat)
    anchor = fp.a_mat @ p
    y = fp.ratio(p)
    trace = [DinkelbachStep(0, y, y, c0 - fp.p_budget, None)]
    if y <= 0:
        # A p0 orthogonal to everything useful: ratio is zero and so is the gradient
        return p, trace
    for t in range(1, max_iter + 1):
        if refresh:
            anchor = fp.a_mat @ p
        p_new, info = solve_concave_qcqp(anchor, y, fp.b_mat, fp.c_mat, fp.p_budget,
                                         qcqp_tol, pencil=pencil, full_output=True)
        if not np.any(p_new):
            raise DegenerateRatioError(f"inner solve returned p = 0 at t={t}")
        step = np.linalg.norm(p_new - p)
        scale = np.linalg.norm(p)
        p = p_new
        y_used, y = y, fp.ratio(p)
        trace.append(DinkelbachStep(t, y_used, y, info.constraint_residual, info))
        if step <= tol_inner * scale:
            break
    return p, trace


def write_trace_csv(trace, fp=None) -> str | None:
    """Write ``t,y,objective,constraint_residual`` rows."""
    out = io.StringIO() if fp is None else fp
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "y", "objective", "constraint_residual"])
    for s in trace:
        w.writerow([s.t, f"{s.y:.10g}", f"{s.objective:.10g}", f"{s.constraint_residual:.10g}"])
    return out.getvalue() if fp is None else None
