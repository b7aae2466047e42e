# %% [markdown]
# # Checking the closed form against a link simulation
#
# Random user subsets, Rayleigh channels, power control, Gray QAM and hard
# decisions. Seeded per chunk, so the thread count never changes a result.

# %%
import math

from mudiv import ChannelModel, Modulation, SystemConfig, exact_ber, run_monte_carlo

qpsk = Modulation.qam(4)

# %%
for K, s in ((1, 5.0), (4, 10.0), (10, 5.0)):
    om = 10 ** (s / 10)
    cfg = SystemConfig(kbar=20, lambda_ga=om)
    rep = run_monte_carlo(cfg, qpsk, ChannelModel(), K, om, 300_000, symbols_per_slot=1, seed=1, workers=4)
    p = exact_ber(qpsk, K, om)
    z = (rep.empirical_ber - p) / math.sqrt(p * (1 - p) / rep.total_bits)
    print(f"K={K:2d} {s:4.1f} dB  sim {rep.empirical_ber:.4e}  exact {p:.4e}  z={z:+.2f}")

# %%
print(rep.to_json(indent=1)[:400])
