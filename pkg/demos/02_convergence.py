# %% [markdown]
# # Convergence of the norm/direction alternation
#
# Each proposed method alternates between choosing a direction for a fixed
# norm and recomputing the norm from the power budget. Here we print the
# per-iteration norm and rate for N = 4 and N = 128.

# %%
from activeirs import Geometry, PathLossModel, SystemParams, sample_channel
from activeirs.beamformers import PROPOSED, run_method

for n in (4, 128):
    params = SystemParams(n=n)
    ch = sample_channel(Geometry(), PathLossModel(), params, seed=11)
    print(f"--- N = {n}")
    for tag in PROPOSED:
        out = run_method(tag, ch, params)
        steps = "  ".join(f"k={r.k}: lam={r.lam:9.2f} R={r.rate_bits:6.3f}" for r in out.trace)
        print(f"{tag:12s} {steps}")

# %% [markdown]
# The same traces for many trials come from the harness (CSV columns
# method, n, trial, k, lambda, rate_bits):

# %%
from activeirs import harness

cfg = harness.with_overrides(harness.parse_config(""), trials=20, methods=PROPOSED)
ds = harness.run_convergence(cfg)
print(ds.to_csv()[:400])
