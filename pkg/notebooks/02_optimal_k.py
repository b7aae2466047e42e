# %% [markdown]
# # How many users should compete for the channel?
#
# Every active user pays a scheduling cost E_f. With the total energy held
# at its all-users value, dropping users frees energy for data, which raises
# the SNR but lowers the selection diversity. The sign of eta(K), the
# K-derivative of the log-BER, locates the balance.

# %%
import numpy as np

from mudiv import BerEstimator, BerKind, EtaContext, Modulation, SystemConfig, eta, solve_kb_min_ber

qpsk = Modulation.qam(4)
cfg = SystemConfig.from_snr_db(100, 4.0, alpha=1.0)

# %%
ks = np.arange(1, 101)
e = eta(EtaContext.energy_constrained(cfg, qpsk), ks)
flip = int(np.argmax(e >= 0))
print(f"eta changes sign between K={ks[flip - 1]} and K={ks[flip]}")

# %%
for kind in ("approx", "exact", "ub"):
    out = solve_kb_min_ber(cfg, qpsk, BerEstimator(BerKind(kind)))
    print(f"{kind:>6}: K* = {out.k_star:3d}  BER = {out.achieved_ber:.3e}  data-power gain {out.gain_vs_ga_db:.2f} dB")

# %% [markdown]
# As the SNR grows, diversity matters more than the energy it costs, and the
# optimum drifts up to all users.

# %%
from mudiv import kb_snr_sweep

base = SystemConfig(kbar=50, alpha=2.0)
for s, k in zip(range(0, 121, 20), kb_snr_sweep(base, qpsk, range(0, 121, 20))):
    print(f"Omega_N = {s:3d} dB -> K* = {k}")
