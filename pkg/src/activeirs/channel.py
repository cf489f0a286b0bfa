"""Seeded Rayleigh-fading channel realizations for the BS -> IRS -> user link.

Large-scale attenuation follows ``gain(d) = ref_gain * d**(-alpha)``; small-scale
fading is unit-variance circularly-symmetric complex Gaussian, scaled by the
square root of the link gain.
"""
from __future__ import annotations

import csv
import hashlib
import io
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Geometry",
    "PathLossModel",
    "SystemParams",
    "ChannelRealization",
    "path_gain",
    "sample_channel",
    "dbm_to_watt",
    "write_channel_csv",
]


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


@dataclass(frozen=True)
class Geometry:
    """Node positions in meters (2D)."""

    bs_pos: tuple[float, float] = (0.0, 0.0)
    irs_pos: tuple[float, float] = (150.0, 20.0)
    user_pos: tuple[float, float] = (150.0, 0.0)

    def __post_init__(self):
        for name in ("bs_pos", "irs_pos", "user_pos"):
            pos = tuple(float(c) for c in getattr(self, name))
            if len(pos) != 2:
                raise ValueError(f"{name} must have two coordinates, got {pos}")
            object.__setattr__(self, name, pos)
        for name, d in self.distances().items():
            if not d > 0:
                raise ValueError(f"distance {name} must be strictly positive")

    def distances(self) -> dict[str, float]:
        return {
            "bs_irs": math.dist(self.bs_pos, self.irs_pos),
            "irs_user": math.dist(self.irs_pos, self.user_pos),
            "bs_user": math.dist(self.bs_pos, self.user_pos),
        }


@dataclass(frozen=True)
class PathLossModel:
    ref_gain: float = 1e-3
    alpha_bi: float = 2.2
    alpha_iu: float = 2.2
    alpha_bu: float = 3.5

    def __post_init__(self):
        if not self.ref_gain > 0:
            raise ValueError("ref_gain must be > 0")
        for name in ("alpha_bi", "alpha_iu", "alpha_bu"):
            if not getattr(self, name) > 2:
                raise ValueError(f"{name} must be > 2")


@dataclass(frozen=True)
class SystemParams:
    """Power budgets and noise variances, all in watts.

    The defaults correspond to 35 dBm transmit power, 25 dBm reflect budget
    and -70 dBm noise at both the IRS and the user.
    """

    p_s: float = dbm_to_watt(35.0)
    p_i: float = dbm_to_watt(25.0)
    sigma_i_sq: float = dbm_to_watt(-70.0)
    sigma_u_sq: float = dbm_to_watt(-70.0)
    n: int = 64

    def __post_init__(self):
        for name in ("p_s", "p_i", "sigma_i_sq", "sigma_u_sq"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    def with_n(self, n: int) -> "SystemParams":
        return SystemParams(self.p_s, self.p_i, self.sigma_i_sq, self.sigma_u_sq, n)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """One draw of the three links.

    ``g`` is the BS->IRS channel (``G = diag(g)``), ``f`` the IRS->user channel
    (the receiver applies ``f^H``) and ``h`` the direct BS->user gain.
    """

    g: np.ndarray
    f: np.ndarray
    h: complex
    phi_h: float = field(init=False)

    def __post_init__(self):
        g = np.asarray(self.g, dtype=complex).ravel()
        f = np.asarray(self.f, dtype=complex).ravel()
        if g.shape != f.shape:
            raise ValueError(f"g and f lengths differ: {g.size} != {f.size}")
        g.flags.writeable = False
        f.flags.writeable = False
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "h", complex(self.h))
        object.__setattr__(self, "phi_h", float(np.angle(self.h)))

    @property
    def n(self) -> int:
        return self.g.size

    @property
    def cascade(self) -> np.ndarray:
        """``G^H f``, the per-element cascaded channel."""
        return np.conj(self.g) * self.f

    def digest(self) -> str:
        m = hashlib.sha256()
        m.update(self.g.tobytes())
        m.update(self.f.tobytes())
        m.update(np.complex128(self.h).tobytes())
        return m.hexdigest()


def path_gain(distance: float, exponent: float, ref_gain: float) -> float:
    """Large-scale power gain ``ref_gain * distance**(-exponent)``."""
    if not distance > 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    if not exponent > 0:
        raise ValueError(f"exponent must be > 0, got {exponent}")
    if not ref_gain > 0:
        raise ValueError(f"ref_gain must be > 0, got {ref_gain}")
    return ref_gain * distance ** (-exponent)


def _cn(rng: np.random.Generator, size, variance: float) -> np.ndarray:
    z = rng.standard_normal((int(size), 2))
    return math.sqrt(variance / 2.0) * (z[:, 0] + 1j * z[:, 1])


def sample_channel(geometry: Geometry, plm: PathLossModel, params: SystemParams,
                   seed: int) -> ChannelRealization:
    """Draw (g, f, h) for ``params.n`` elements.

    Each link uses its own child stream of ``seed``, so a realization with
    fewer elements is a prefix of one with more elements under the same seed.
    """
    d = geometry.distances()
    rng_g, rng_f, rng_h = (np.random.default_rng(s)
                           for s in np.random.SeedSequence(int(seed)).spawn(3))
    g = _cn(rng_g, params.n, path_gain(d["bs_irs"], plm.alpha_bi, plm.ref_gain))
    f = _cn(rng_f, params.n, path_gain(d["irs_user"], plm.alpha_iu, plm.ref_gain))
    h = _cn(rng_h, 1, path_gain(d["bs_user"], plm.alpha_bu, plm.ref_gain))[0]
    return ChannelRealization(g, f, h)


def write_channel_csv(rows, fp=None) -> str | None:
    """Dump ``(trial, ChannelRealization)`` pairs as ``trial,link,element_index,re,im``.

    Returns the CSV text when ``fp`` is None.
    """
    out = io.StringIO() if fp is None else fp
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["trial", "link", "element_index", "re", "im"])
    for trial, ch in rows:
        for link, vec in (("g", ch.g), ("f", ch.f), ("h", np.array([ch.h]))):
            for i, v in enumerate(vec):
                w.writerow([trial, link, i, f"{v.real:.10g}", f"{v.imag:.10g}"])
    return out.getvalue() if fp is None else None
