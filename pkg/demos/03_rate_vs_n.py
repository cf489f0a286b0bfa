# %% [markdown]
# # Achievable rate against the number of IRS elements
#
# All methods see the same channel draws in each trial (common random
# numbers). Keep the trial count small here; the CLI runs the full sweep:
#
#     activeirs rate-vs-n --trials 500 --out rate_vs_n.csv

# %%
from activeirs import harness

cfg = harness.with_overrides(harness.parse_config(""), trials=50)
ds = harness.run_rate_vs_n(cfg)

methods = cfg.methods
table = {(m, n): mean for m, n, mean, _, _ in ds.rows}
print("N     " + "".join(f"{m:>13s}" for m in methods))
for n in cfg.n_list:
    print(f"{n:<6d}" + "".join(f"{table[m, n]:13.3f}" for m in methods))

# %%
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    for m in methods:
        plt.plot(cfg.n_list, [table[m, n] for n in cfg.n_list], marker="o", label=m)
    plt.xlabel("IRS elements N")
    plt.ylabel("rate (bits/s/Hz)")
    plt.legend()
    plt.savefig("rate_vs_n.png", dpi=120)
