# %% [markdown]
# # One channel, every beamformer
#
# Draw a single Rayleigh realization with the default geometry (BS at the
# origin, IRS at (150, 20) m, user at (150, 0) m) and compare the rate of
# each design on it.

# %%
import numpy as np

from activeirs import Geometry, PathLossModel, SystemParams, sample_channel
from activeirs import metrics
from activeirs.beamformers import METHODS, run_method

params = SystemParams(n=64)
ch = sample_channel(Geometry(), PathLossModel(), params, seed=3)
print(f"N = {ch.n}, |h|^2 = {abs(ch.h)**2:.3e}, mean |g|^2 = {np.mean(abs(ch.g)**2):.3e}")

# %% [markdown]
# Active designs spend exactly the reflect budget; the passive baseline
# has unit-modulus entries and no amplification noise.

# %%
for tag in METHODS:
    out = run_method(tag, ch, params)
    if tag == "passive":
        power = "n/a"
    else:
        power = f"{metrics.reflect_power(out.beam.p, ch, params) / params.p_i:.12f} P_I"
    print(f"{tag:12s} rate = {out.rate_bits:7.3f} bits  iterations = {out.iterations}  power = {power}")
