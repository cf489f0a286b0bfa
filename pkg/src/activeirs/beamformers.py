"""IRS beamformer designs.

Every active design alternates between two subproblems: for a fixed norm
``lam`` choose the unit direction ``p_bar``; for a fixed direction recompute
``lam`` from the reflect-power budget. They differ only in the direction rule:

``gmrr``
    diagonal approximation of the Max-RSNR feature matrix (closed form).
``max_rsnr``
    full feature matrix ``sigma_I^2 f f^H + lam^-2 sigma_U^2 I`` (closed form).
``max_ssnr_rr``
    principal generalized eigenvector of the simplified-SNR matrix pair.
``max_ssnr_fp``
    Dinkelbach iterations with the reflect-power constraint kept explicit.

``passive_phase_align`` is the unit-modulus baseline without amplification.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Callable, NamedTuple

import numpy as np

from . import metrics
from .channel import ChannelRealization, SystemParams
from .metrics import BeamVector, align_phase, compute_lambda
from .qcqp import DinkelbachStep, FPMatrices, dinkelbach
from .spectral import principal_eigvec, principal_eigvec_low_rank, rank_one_rayleigh_max

__all__ = [
    "SolverTolerances",
    "DiagonalFeature",
    "TraceRow",
    "BeamformerOutput",
    "mrr_init",
    "gmrr",
    "max_rsnr",
    "max_ssnr_rr",
    "max_ssnr_fp",
    "passive_phase_align",
    "METHODS",
    "PROPOSED",
    "run_method",
    "write_trace_csv",
]


@dataclass(frozen=True)
class SolverTolerances:
    eps_outer: float = 1e-3   # relative change of lam between outer iterations
    eps_inner: float = 1e-4   # relative step ||p[t+1] - p[t]|| / ||p[t]||
    max_outer: int = 50
    max_inner: int = 100

    def __post_init__(self):
        if not (self.eps_outer > 0 and self.eps_inner > 0):
            raise ValueError("tolerances must be positive")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be >= 1")


@dataclass(frozen=True, eq=False)
class DiagonalFeature:
    """Diagonal of ``E = diag(sigma_I^2 |f_n|^2 + sigma_U^2 / lam^2)`` and ``D = sqrt(E)``."""

    e_diag: np.ndarray
    d_diag: np.ndarray

    @classmethod
    def build(cls, ch: ChannelRealization, params: SystemParams, lam: float):
        e = params.sigma_i_sq * np.abs(ch.f) ** 2 + params.sigma_u_sq / lam**2
        return cls(e, np.sqrt(e))


class TraceRow(NamedTuple):
    k: int
    lam: float
    objective: float
    rate_bits: float


@dataclass(eq=False)
class BeamformerOutput:
    method: str
    beam: BeamVector
    rate_bits: float
    trace: list[TraceRow]
    iterations: int
    converged: bool = True
    # norm at which the final direction was chosen
    direction_lambda: float | None = None
    flags: tuple[str, ...] = ()
    inner_iterations: list[int] = field(default_factory=list)
    inner_traces: list[list[DinkelbachStep]] = field(default_factory=list)


def _cascade_is_zero(ch: ChannelRealization) -> bool:
    return not np.any(ch.cascade)


def mrr_init(ch: ChannelRealization, params: SystemParams) -> BeamVector:
    """Maximum-ratio reflection: ``p_bar = normalize(G^H f) e^{-j phi_h}``, power-scaled.

    When ``G^H f = 0`` a uniform-phase direction is used instead.
    """
    u = ch.cascade
    if _cascade_is_zero(ch):
        d = np.ones(ch.n, dtype=complex)
    else:
        d = u
    p_bar = d / np.linalg.norm(d) * np.exp(-1j * ch.phi_h)
    return BeamVector.from_direction(p_bar, compute_lambda(p_bar, ch, params))


def _finish(method, ch, params, p_bar, lam, trace, iterations, converged, lam_dir,
            flags=(), **extra) -> BeamformerOutput:
    p = align_phase(lam * p_bar, ch)
    beam = BeamVector(p, lam, p / lam)
    return BeamformerOutput(method, beam, metrics.rate(p, ch, params), trace, iterations,
                            converged, lam_dir, tuple(flags), **extra)


def _degenerate(method, ch, params) -> BeamformerOutput:
    init = mrr_init(ch, params)
    obj = metrics.ssnr(init.p_bar, init.lam, ch, params)
    trace = [TraceRow(0, init.lam, obj, metrics.rate(init.p, ch, params))]
    return _finish(method, ch, params, init.p_bar, init.lam, trace, 0, True, init.lam,
                   ("degenerate_cascade",))


def _alternate(method: str, ch: ChannelRealization, params: SystemParams,
               tols: SolverTolerances, direction: Callable[[float], np.ndarray],
               objective: Callable[[np.ndarray, float], float]) -> BeamformerOutput:
    init = mrr_init(ch, params)
    lam, p_bar = init.lam, init.p_bar
    trace = [TraceRow(0, lam, objective(p_bar, lam),
                      metrics.rate(align_phase(init.p, ch), ch, params))]
    converged = False
    lam_dir = lam
    k = 0
    for k in range(1, tols.max_outer + 1):
        d = direction(lam)
        p_bar = d / np.linalg.norm(d)
        lam_dir, lam = lam, compute_lambda(p_bar, ch, params)
        trace.append(TraceRow(k, lam, objective(p_bar, lam),
                              metrics.rate(align_phase(lam * p_bar, ch), ch, params)))
        if abs(lam - lam_dir) <= tols.eps_outer * lam_dir:
            converged = True
            break
    flags = () if converged else ("max_outer_reached",)
    return _finish(method, ch, params, p_bar, lam, trace, k, converged, lam_dir, flags)


def gmrr(ch: ChannelRealization, params: SystemParams,
         tols: SolverTolerances = SolverTolerances()) -> BeamformerOutput:
    """Generalized maximum ratio reflection.

    For the current ``lam`` the direction is ``D^{-H} D^{-1} G^H f`` (up to
    scale), with ``D`` the diagonal square root of the RSNR feature matrix
    stripped of its off-diagonal entries.
    """
    if _cascade_is_zero(ch):
        return _degenerate("gmrr", ch, params)
    u = ch.cascade

    def direction(lam):
        feat = DiagonalFeature.build(ch, params, lam)
        p_hat = u / feat.d_diag
        p_hat /= np.linalg.norm(p_hat)
        return p_hat / feat.d_diag * np.exp(-1j * ch.phi_h)

    def objective(p_bar, lam):
        return metrics.rsnr(lam * p_bar, ch, params, lam)

    return _alternate("gmrr", ch, params, tols, direction, objective)


def rsnr_feature_matrix(ch: ChannelRealization, params: SystemParams, lam: float) -> np.ndarray:
    """``C(lam) = sigma_I^2 f f^H + lam^-2 sigma_U^2 I``."""
    f = ch.f
    return (params.sigma_i_sq * np.outer(f, f.conj())
            + params.sigma_u_sq / lam**2 * np.eye(ch.n))


def max_rsnr(ch: ChannelRealization, params: SystemParams,
             tols: SolverTolerances = SolverTolerances()) -> BeamformerOutput:
    """Max-RSNR baseline: exact RSNR maximizer ``C(lam)^{-1} G^H f`` at each ``lam``."""
    if _cascade_is_zero(ch):
        return _degenerate("max_rsnr", ch, params)
    u = ch.cascade

    def direction(lam):
        return rank_one_rayleigh_max(rsnr_feature_matrix(ch, params, lam), u) * np.exp(-1j * ch.phi_h)

    def objective(p_bar, lam):
        return metrics.rsnr(lam * p_bar, ch, params, lam)

    return _alternate("max_rsnr", ch, params, tols, direction, objective)


def ssnr_pencil(ch: ChannelRealization, params: SystemParams, lam: float):
    """Dense ``(P_S lam^2 G^H f f^H G + P_S |h|^2 I,  lam^2 sigma_I^2 f f^H + sigma_U^2 I)``."""
    u, f, n = ch.cascade, ch.f, ch.n
    a = params.p_s * lam**2 * np.outer(u, u.conj()) + params.p_s * abs(ch.h) ** 2 * np.eye(n)
    b = lam**2 * params.sigma_i_sq * np.outer(f, f.conj()) + params.sigma_u_sq * np.eye(n)
    return a, b


def max_ssnr_rr(ch: ChannelRealization, params: SystemParams,
                tols: SolverTolerances = SolverTolerances(), *, dense=False) -> BeamformerOutput:
    """Max-SSNR via Rayleigh-Ritz.

    With ``dense=True`` the eigenproblem is solved on the full N x N pencil;
    otherwise the rank-one-plus-identity structure is reduced to ``span{G^H f, f}``.
    """
    u = ch.cascade

    def direction(lam):
        if dense:
            return principal_eigvec(*ssnr_pencil(ch, params, lam))
        # divide the pencil by P_S lam^2 so the numerator's rank-one term has unit weight
        return principal_eigvec_low_rank(
            u, abs(ch.h) ** 2 / lam**2,
            ch.f, params.sigma_i_sq / params.p_s,
            params.sigma_u_sq / (params.p_s * lam**2))

    def objective(p_bar, lam):
        return metrics.ssnr(p_bar, lam, ch, params)

    return _alternate("max_ssnr_rr", ch, params, tols, direction, objective)


def fp_matrices(ch: ChannelRealization, params: SystemParams, lam: float) -> FPMatrices:
    """``A(lam)``, ``B(lam)`` and the reflect-power matrix ``C`` for the ratio program."""
    u, f, n = ch.cascade, ch.f, ch.n
    eye = np.eye(n)
    a = params.p_s * np.outer(u, u.conj()) + params.p_s * abs(ch.h) ** 2 / lam**2 * eye
    b = params.sigma_i_sq * np.outer(f, f.conj()) + params.sigma_u_sq / lam**2 * eye
    c = np.diag(params.p_s * np.abs(ch.g) ** 2 + params.sigma_i_sq).astype(complex)
    return FPMatrices(a, b, c, params.p_i)


def max_ssnr_fp(ch: ChannelRealization, params: SystemParams,
                tols: SolverTolerances = SolverTolerances(), *, refresh=True) -> BeamformerOutput:
    """Max-SSNR via fractional programming.

    Outer loop over ``lam`` starting from the MRR beam; the inner Dinkelbach
    loop warm-starts from the previous full beamformer ``p``. ``refresh=False``
    keeps the linearization point fixed at the inner start instead of moving
    it with each iterate.
    """
    init = mrr_init(ch, params)
    lam, p = init.lam, init.p
    p_bar = init.p_bar
    trace = [TraceRow(0, lam, metrics.ssnr(p_bar, lam, ch, params),
                      metrics.rate(align_phase(p, ch), ch, params))]
    inner_counts, inner_traces = [], []
    converged = False
    lam_dir = lam
    k = 0
    for k in range(1, tols.max_outer + 1):
        fp = fp_matrices(ch, params, lam)
        try:
            p_new, dtrace = dinkelbach(fp, p, tols.eps_inner, tols.max_inner, refresh=refresh)
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
            raise type(exc)(f"max_ssnr_fp outer iteration {k}: {exc}") from exc
        inner_counts.append(len(dtrace) - 1)
        inner_traces.append(dtrace)
        p_bar = p_new / np.linalg.norm(p_new)
        lam_dir, lam = lam, compute_lambda(p_bar, ch, params)
        p = lam * p_bar
        trace.append(TraceRow(k, lam, metrics.ssnr(p_bar, lam, ch, params),
                              metrics.rate(align_phase(p, ch), ch, params)))
        if abs(lam - lam_dir) <= tols.eps_outer * lam_dir:
            converged = True
            break
    flags = () if converged else ("max_outer_reached",)
    return _finish("max_ssnr_fp", ch, params, p_bar, lam, trace, k, converged, lam_dir, flags,
                   inner_iterations=inner_counts, inner_traces=inner_traces)


def passive_phase_align(ch: ChannelRealization, params: SystemParams,
                        tols: SolverTolerances | None = None) -> BeamformerOutput:
    """Unit-modulus reflection co-phasing every cascaded term with ``h^H``.

    Rate is evaluated without amplification noise. ``tols`` is ignored.
    """
    p = np.exp(-1j * (ch.phi_h + np.angle(np.conj(ch.f) * ch.g)))
    beam = BeamVector.from_vector(p)
    snr = metrics.passive_snr(p, ch, params)
    r = float(np.log2(1.0 + snr))
    return BeamformerOutput("passive", beam, r, [TraceRow(0, beam.lam, snr, r)], 0,
                            True, beam.lam)


def _mrr_method(ch, params, tols=None) -> BeamformerOutput:
    b = mrr_init(ch, params)
    p = align_phase(b.p, ch)
    r = metrics.rate(p, ch, params)
    flags = ("degenerate_cascade",) if _cascade_is_zero(ch) else ()
    return BeamformerOutput("mrr", BeamVector(p, b.lam, p / b.lam), r,
                            [TraceRow(0, b.lam, metrics.rsnr(p, ch, params, b.lam)
                                      if not flags else 0.0, r)], 0, True, b.lam, flags)


METHODS: dict[str, Callable[..., BeamformerOutput]] = {
    "passive": passive_phase_align,
    "mrr": _mrr_method,
    "max_rsnr": max_rsnr,
    "gmrr": gmrr,
    "max_ssnr_rr": max_ssnr_rr,
    "max_ssnr_fp": max_ssnr_fp,
}

PROPOSED = ("gmrr", "max_ssnr_rr", "max_ssnr_fp")


def run_method(tag: str, ch: ChannelRealization, params: SystemParams,
               tols: SolverTolerances = SolverTolerances()) -> BeamformerOutput:
    try:
        fn = METHODS[tag]
    except KeyError:
        raise ValueError(f"unknown method {tag!r}; choose from {sorted(METHODS)}") from None
    return fn(ch, params, tols)


def write_trace_csv(outputs, fp=None) -> str | None:
    """Write ``method,k,lambda,objective,rate_bits`` rows for each output."""
    out = io.StringIO() if fp is None else fp
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["method", "k", "lambda", "objective", "rate_bits"])
    for o in outputs:
        for row in o.trace:
            w.writerow([o.method, row.k, f"{row.lam:.10g}", f"{row.objective:.10g}",
                        f"{row.rate_bits:.10g}"])
    return out.getvalue() if fp is None else None
