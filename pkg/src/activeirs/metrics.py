"""Closed-form link quantities: reflect power, norm normalization, SNR variants, rate.

``G = diag(g)`` is diagonal, so ``G^H G`` and ``G G^H`` are both ``diag(|g|^2)``
and are evaluated elementwise. Rank-one forms ``x^H f f^H x`` are computed as
``|f^H x|^2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization, SystemParams

__all__ = [
    "BeamVector",
    "reflect_power",
    "compute_lambda",
    "snr",
    "rate",
    "rsnr",
    "ssnr",
    "passive_snr",
    "passive_rate",
    "align_phase",
]

UNIT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class BeamVector:
    """IRS beamformer ``p`` split as ``lam * p_bar`` with ``||p_bar|| = 1``."""

    p: np.ndarray
    lam: float
    p_bar: np.ndarray

    @classmethod
    def from_direction(cls, p_bar, lam: float) -> "BeamVector":
        p_bar = np.asarray(p_bar, dtype=complex)
        p_bar = p_bar / np.linalg.norm(p_bar)
        return cls(lam * p_bar, float(lam), p_bar)

    @classmethod
    def from_vector(cls, p) -> "BeamVector":
        p = np.asarray(p, dtype=complex)
        lam = float(np.linalg.norm(p))
        p_bar = p / lam if lam > 0 else np.zeros_like(p)
        return cls(p, lam, p_bar)


def _check_len(p: np.ndarray, ch: ChannelRealization) -> np.ndarray:
    p = np.asarray(p, dtype=complex)
    if p.shape != (ch.n,):
        raise ValueError(f"beamformer has shape {p.shape}, expected ({ch.n},)")
    return p


def reflect_power(p, ch: ChannelRealization, params: SystemParams) -> float:
    """Total power radiated by the active IRS, ``P_S p^H G^H G p + sigma_I^2 ||p||^2``."""
    p = _check_len(p, ch)
    a2 = np.abs(p) ** 2
    return float(params.p_s * np.dot(np.abs(ch.g) ** 2, a2) + params.sigma_i_sq * a2.sum())


def compute_lambda(p_bar, ch: ChannelRealization, params: SystemParams) -> float:
    """Norm of ``p`` that spends exactly the reflect budget along unit direction ``p_bar``."""
    p_bar = _check_len(p_bar, ch)
    nrm = np.linalg.norm(p_bar)
    if abs(nrm - 1.0) > UNIT_TOL:
        raise ValueError(f"p_bar must have unit norm, got {nrm!r}")
    a2 = np.abs(p_bar) ** 2
    denom = params.p_s * np.dot(np.abs(ch.g) ** 2, a2) + params.sigma_i_sq * a2.sum()
    return float(np.sqrt(params.p_i / denom))


def _reflected(p, ch):
    # f^H G p == f^H P g for P = diag(p)
    return np.vdot(ch.f, ch.g * p)


def snr(p, ch: ChannelRealization, params: SystemParams) -> float:
    p = _check_len(p, ch)
    num = abs(np.conj(ch.h) + _reflected(p, ch)) ** 2
    den = params.sigma_i_sq * abs(np.vdot(ch.f, p)) ** 2 + params.sigma_u_sq
    return float(params.p_s * num / den)


def rate(p, ch: ChannelRealization, params: SystemParams) -> float:
    """Achievable rate in bits per channel use."""
    return float(np.log2(1.0 + snr(p, ch, params)))


def rsnr(p, ch: ChannelRealization, params: SystemParams, lam: float) -> float:
    """Reflected-path SNR with the user noise folded in through ``lam**-2``."""
    p = _check_len(p, ch)
    if not lam > 0:
        raise ValueError("lam must be > 0")
    pp = np.vdot(p, p).real
    if pp == 0:
        raise ValueError("rsnr undefined for p = 0")
    num = params.p_s * abs(_reflected(p, ch)) ** 2
    den = params.sigma_i_sq * abs(np.vdot(ch.f, p)) ** 2 + params.sigma_u_sq / lam**2 * pp
    return float(num / den)


def ssnr(p_bar, lam: float, ch: ChannelRealization, params: SystemParams) -> float:
    """SNR with the direct/reflected cross-term dropped, evaluated at ``p = lam * p_bar``."""
    p_bar = _check_len(p_bar, ch)
    if abs(np.linalg.norm(p_bar) - 1.0) > UNIT_TOL:
        raise ValueError("p_bar must have unit norm")
    if not lam > 0:
        raise ValueError("lam must be > 0")
    num = params.p_s * (lam**2 * abs(_reflected(p_bar, ch)) ** 2 + abs(ch.h) ** 2)
    den = lam**2 * params.sigma_i_sq * abs(np.vdot(ch.f, p_bar)) ** 2 + params.sigma_u_sq
    return float(num / den)


def passive_snr(p, ch: ChannelRealization, params: SystemParams) -> float:
    """SNR of a passive reflector: no amplification noise, user noise only."""
    p = _check_len(p, ch)
    return float(params.p_s * abs(np.conj(ch.h) + _reflected(p, ch)) ** 2 / params.sigma_u_sq)


def passive_rate(p, ch: ChannelRealization, params: SystemParams) -> float:
    return float(np.log2(1.0 + passive_snr(p, ch, params)))


def align_phase(p, ch: ChannelRealization) -> np.ndarray:
    """Rotate ``p`` globally so the reflected term ``f^H G p`` is co-phased with ``h^H``.

    Returns ``p`` unchanged when the reflected term vanishes.
    """
    p = _check_len(p, ch)
    c = _reflected(p, ch)
    if c == 0:
        return p.copy()
    return p * np.exp(-1j * (ch.phi_h + np.angle(c)))
