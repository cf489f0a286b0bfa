"""Iterative beamformers for an active-IRS-assisted single-antenna link."""
from .beamformers import (
    METHODS,
    BeamformerOutput,
    SolverTolerances,
    gmrr,
    max_rsnr,
    max_ssnr_fp,
    max_ssnr_rr,
    mrr_init,
    passive_phase_align,
    run_method,
)
from .channel import (
    ChannelRealization,
    Geometry,
    PathLossModel,
    SystemParams,
    dbm_to_watt,
    path_gain,
    sample_channel,
)
from .harness import ExperimentConfig, parse_config
from .metrics import BeamVector, compute_lambda, rate, reflect_power, snr

__version__ = "0.1.0"
