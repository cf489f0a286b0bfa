"""Seeded Monte-Carlo experiments, complexity models and configuration.

Config files are INI-style documents with the sections ``geometry``,
``pathloss``, ``power``, ``solver`` and ``experiment``. Keys may also be
written before the first section header. Power entries are given in dBm and
converted to watts on load::

    [power]
    p_s_dbm = 35
    p_i_dbm = 25
    sigma_i_dbm = -70
    sigma_u_dbm = -70

    [experiment]
    methods = passive, max_rsnr, gmrr, max_ssnr_rr, max_ssnr_fp
    n_list = 16, 32, 64, 128, 256
    trials = 500
    base_seed = 0
"""
from __future__ import annotations

import configparser
import csv
import io
import math
import os
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import NamedTuple, Sequence

import numpy as np

from .beamformers import METHODS, PROPOSED, SolverTolerances, run_method
from .channel import Geometry, PathLossModel, SystemParams, dbm_to_watt, sample_channel

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ComplexityParams",
    "RateSample",
    "Dataset",
    "parse_config",
    "flop_count",
    "run_trials",
    "run_convergence",
    "run_rate_vs_n",
    "run_flops",
    "measure_complexity_params",
    "worker_count",
    "WORKERS_ENV",
]

WORKERS_ENV = "ACTIVEIRS_WORKERS"
DEFAULT_METHODS = ("passive", "max_rsnr", "gmrr", "max_ssnr_rr", "max_ssnr_fp")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ComplexityParams:
    l1: int = 1
    l2: int = 1
    l3: int = 1
    l4: int = 1

    def __post_init__(self):
        for name in ("l1", "l2", "l3", "l4"):
            v = getattr(self, name)
            if int(v) != v or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v}")


@dataclass(frozen=True)
class ExperimentConfig:
    geometry: Geometry = field(default_factory=Geometry)
    pathloss: PathLossModel = field(default_factory=PathLossModel)
    power: SystemParams = field(default_factory=SystemParams)
    methods: tuple[str, ...] = DEFAULT_METHODS
    n_list: tuple[int, ...] = (16, 32, 64, 128, 256)
    convergence_n: tuple[int, ...] = (4, 128)
    trials: int = 500
    base_seed: int = 0
    tolerances: SolverTolerances = field(default_factory=SolverTolerances)
    complexity: ComplexityParams | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ConfigError("n_list must be non-empty with every entry >= 1")
        if not self.convergence_n or any(n < 1 for n in self.convergence_n):
            raise ConfigError("convergence_n must be non-empty with every entry >= 1")
        if not self.methods:
            raise ConfigError("methods must be non-empty")
        for m in self.methods:
            if m not in METHODS:
                raise ConfigError(f"methods: unknown method {m!r}")
        if not 0 <= self.base_seed < 2**64:
            raise ConfigError("base_seed must be an unsigned 64-bit integer")

    def params(self, n: int) -> SystemParams:
        return self.power.with_n(n)


# --- config parsing ----------------------------------------------------------

def _floats(text):
    return tuple(float(x) for x in text.replace(";", ",").split(",") if x.strip())


def _ints(text):
    return tuple(int(x) for x in text.replace(";", ",").split(",") if x.strip())


def _names(text):
    return tuple(x.strip() for x in text.split(",") if x.strip())


# key -> (section, converter)
_KEYS = {
    "bs_pos": ("geometry", _floats),
    "irs_pos": ("geometry", _floats),
    "user_pos": ("geometry", _floats),
    "ref_gain": ("pathloss", float),
    "ref_gain_db": ("pathloss", float),
    "alpha_bi": ("pathloss", float),
    "alpha_iu": ("pathloss", float),
    "alpha_bu": ("pathloss", float),
    "p_s_dbm": ("power", float),
    "p_i_dbm": ("power", float),
    "sigma_i_dbm": ("power", float),
    "sigma_u_dbm": ("power", float),
    "eps_outer": ("solver", float),
    "eps_inner": ("solver", float),
    "max_outer": ("solver", int),
    "max_inner": ("solver", int),
    "methods": ("experiment", _names),
    "n_list": ("experiment", _ints),
    "convergence_n": ("experiment", _ints),
    "trials": ("experiment", int),
    "base_seed": ("experiment", int),
    "output": ("experiment", str),
    "l1": ("experiment", int),
    "l2": ("experiment", int),
    "l3": ("experiment", int),
    "l4": ("experiment", int),
}
_ROOT = "__root__"


def parse_config(source: str | os.PathLike = "") -> ExperimentConfig:
    """Build an :class:`ExperimentConfig` from a file path or inline text.

    A :class:`pathlib.Path` (or any ``os.PathLike``) is read from disk; a
    ``str`` is parsed as the document itself. Missing keys keep their defaults.
    """
    if isinstance(source, os.PathLike):
        try:
            text = Path(source).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {os.fspath(source)!r}: {exc}") from exc
    else:
        text = source
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(f"[{_ROOT}]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None

    values = {}
    for section in cp.sections():
        if section != _ROOT and section not in {s for s, _ in _KEYS.values()}:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _KEYS:
                raise ConfigError(f"unknown field {key!r}")
            want, conv = _KEYS[key]
            if section not in (_ROOT, want):
                raise ConfigError(f"field {key!r} belongs in section [{want}]")
            if key in values:
                raise ConfigError(f"field {key!r} given twice")
            try:
                values[key] = conv(raw)
            except ValueError:
                raise ConfigError(f"field {key!r}: cannot parse {raw!r}") from None
    return _build(values)


def _build(v: dict) -> ExperimentConfig:
    def sub(cls, fields, **extra):
        kw = {k: v[k] for k in fields if k in v}
        kw.update(extra)
        try:
            return cls(**kw)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    geometry = sub(Geometry, ("bs_pos", "irs_pos", "user_pos"))
    if "ref_gain" in v and "ref_gain_db" in v:
        raise ConfigError("give only one of 'ref_gain' and 'ref_gain_db'")
    extra = {"ref_gain": 10 ** (v["ref_gain_db"] / 10)} if "ref_gain_db" in v else {}
    pathloss = sub(PathLossModel, ("ref_gain", "alpha_bi", "alpha_iu", "alpha_bu"), **extra)
    dbm = {"p_s_dbm": "p_s", "p_i_dbm": "p_i", "sigma_i_dbm": "sigma_i_sq",
           "sigma_u_dbm": "sigma_u_sq"}
    power = sub(SystemParams, (), **{w: dbm_to_watt(v[k]) for k, w in dbm.items() if k in v})
    tols = sub(SolverTolerances, ("eps_outer", "eps_inner", "max_outer", "max_inner"))
    cplx = None
    if any(k in v for k in ("l1", "l2", "l3", "l4")):
        cplx = sub(ComplexityParams, ("l1", "l2", "l3", "l4"))
    kw = {k: v[k] for k in ("methods", "n_list", "convergence_n", "trials", "base_seed")
          if k in v}
    try:
        return ExperimentConfig(geometry=geometry, pathloss=pathloss, power=power,
                                tolerances=tols, complexity=cplx,
                                output_path=v.get("output"), **kw)
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# --- complexity --------------------------------------------------------------

def flop_count(method: str, n: int, cp: ComplexityParams) -> int:
    """FLOP model of a proposed method at ``n`` IRS elements.

    ``gmrr``        ``L1 (2N^3 + 13N - 4)``
    ``max_ssnr_rr`` ``L2 (2N^3 + 6N^2 + 7N - 1)``
    ``max_ssnr_fp`` ``L4 L3 (24N^2 + 2N) log2(N) + 5N - 1``, rounded to the nearest integer
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if method == "gmrr":
        return cp.l1 * (2 * n**3 + 13 * n - 4)
    if method == "max_ssnr_rr":
        return cp.l2 * (2 * n**3 + 6 * n**2 + 7 * n - 1)
    if method == "max_ssnr_fp":
        return round(cp.l4 * cp.l3 * (24 * n**2 + 2 * n) * math.log2(n)) + 5 * n - 1
    raise ValueError(f"no FLOP model for method {method!r}")


# --- datasets ----------------------------------------------------------------

class Dataset(NamedTuple):
    columns: tuple[str, ...]
    rows: list[tuple]

    def to_csv(self, fp=None) -> str | None:
        """CSV with LF line endings; floats printed with 10 significant digits."""
        out = io.StringIO() if fp is None else fp
        w = csv.writer(out, lineterminator="\n")
        w.writerow(self.columns)
        for row in self.rows:
            w.writerow([f"{x:.10g}" if isinstance(x, float) else x for x in row])
        return out.getvalue() if fp is None else None

    def write(self, path) -> None:
        try:
            with open(path, "w", encoding="utf-8", newline="") as fh:
                self.to_csv(fh)
        except OSError as exc:
            raise OSError(f"cannot write {os.fspath(path)!r}: {exc}") from exc


class RateSample(NamedTuple):
    method: str
    n: int
    trial: int
    rate_bits: float
    iterations: int
    wall_time: float
    channel_digest: str
    trace: tuple = ()                 # ((k, lam, rate_bits), ...)
    inner_iterations: tuple = ()


# --- trial execution -----------------------------------------------------------

def worker_count(requested: int | None = None) -> int:
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from None
    return 1


def _run_unit(args) -> list[RateSample]:
    # one channel draw shared by every method: common random numbers
    cfg, n, trial, methods, keep_trace = args
    params = cfg.params(n)
    ch = sample_channel(cfg.geometry, cfg.pathloss, params, cfg.base_seed + trial)
    digest = ch.digest()
    out = []
    for m in methods:
        t0 = time.perf_counter()
        res = run_method(m, ch, params, cfg.tolerances)
        dt = time.perf_counter() - t0
        trace = tuple((r.k, r.lam, r.rate_bits) for r in res.trace) if keep_trace else ()
        out.append(RateSample(m, n, trial, res.rate_bits, res.iterations, dt, digest,
                              trace, tuple(res.inner_iterations)))
    return out


def run_trials(cfg: ExperimentConfig, n_values: Sequence[int], methods=None, *,
               workers: int | None = None, keep_trace=False) -> list[RateSample]:
    """Run every method on ``cfg.trials`` seeded channels for each ``n``.

    Trial ``i`` uses seed ``base_seed + i``. Results are sorted by
    ``(method, n, trial)`` so output does not depend on the worker count.
    """
    methods = tuple(methods or cfg.methods)
    units = [(cfg, n, t, methods, keep_trace) for n in n_values for t in range(cfg.trials)]
    nw = worker_count(workers)
    if nw == 1:
        chunks = map(_run_unit, units)
        samples = [s for chunk in chunks for s in chunk]
    else:
        with ProcessPoolExecutor(max_workers=nw) as pool:
            samples = [s for chunk in pool.map(_run_unit, units, chunksize=8) for s in chunk]
    order = {m: i for i, m in enumerate(methods)}
    samples.sort(key=lambda s: (order[s.method], s.n, s.trial))
    return samples


def run_convergence(cfg: ExperimentConfig, *, workers=None, samples=None) -> Dataset:
    """Per-iteration ``lambda`` and rate traces for each method at ``cfg.convergence_n``."""
    if samples is None:
        samples = run_trials(cfg, cfg.convergence_n, workers=workers, keep_trace=True)
    rows = [(s.method, s.n, s.trial, k, float(lam), float(r))
            for s in samples for k, lam, r in s.trace]
    return Dataset(("method", "n", "trial", "k", "lambda", "rate_bits"), rows)


def summarize_rates(samples: Sequence[RateSample]) -> Dataset:
    groups: dict[tuple[str, int], list[float]] = {}
    for s in samples:
        groups.setdefault((s.method, s.n), []).append(s.rate_bits)
    rows = []
    for (m, n), rates in groups.items():
        arr = np.asarray(rates)
        std = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
        rows.append((m, n, float(arr.mean()), std, int(arr.size)))
    return Dataset(("method", "n", "mean_rate_bits", "std_rate_bits", "trials"), rows)


def run_rate_vs_n(cfg: ExperimentConfig, *, workers=None, samples=None) -> Dataset:
    """Mean and standard deviation of the rate per method and element count."""
    if samples is None:
        samples = run_trials(cfg, cfg.n_list, workers=workers)
    return summarize_rates(samples)


def measure_complexity_params(samples: Sequence[RateSample]) -> ComplexityParams:
    """Median iteration counts: L1 (gmrr), L2 (max_ssnr_rr), L4 (max_ssnr_fp outer),
    L3 (Dinkelbach steps per outer iteration). Missing methods default to 1."""
    def med(values):
        values = list(values)
        return max(1, int(round(statistics.median(values)))) if values else 1

    by = lambda m: [s.iterations for s in samples if s.method == m]  # noqa: E731
    inner = [c for s in samples if s.method == "max_ssnr_fp" for c in s.inner_iterations]
    return ComplexityParams(l1=med(by("gmrr")), l2=med(by("max_ssnr_rr")),
                            l3=med(inner), l4=med(by("max_ssnr_fp")))


def run_flops(cfg: ExperimentConfig, cp: ComplexityParams) -> Dataset:
    rows = [(m, n, flop_count(m, n, cp)) for m in PROPOSED for n in cfg.n_list]
    return Dataset(("method", "n", "flops"), rows)


def with_overrides(cfg: ExperimentConfig, **kw) -> ExperimentConfig:
    kw = {k: v for k, v in kw.items() if v is not None}
    try:
        return replace(cfg, **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
