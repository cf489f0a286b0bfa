# %% [markdown]
# # FLOP models of the proposed methods
#
# The iteration counts L1..L4 are measured as medians over a short run and
# plugged into the closed-form FLOP counts.

# %%
from activeirs import harness
from activeirs.beamformers import PROPOSED

cfg = harness.with_overrides(harness.parse_config(""), trials=30,
                             n_list=(4, 16, 64, 256, 1024))
samples = harness.run_trials(cfg, cfg.convergence_n, methods=PROPOSED)
cp = harness.measure_complexity_params(samples)
print(cp)

# %%
for n in cfg.n_list:
    row = {m: harness.flop_count(m, n, cp) for m in PROPOSED}
    print(f"N={n:5d}  " + "  ".join(f"{m}={v:.3e}" for m, v in row.items()))
