# %% [markdown]
# # Receive diversity on top of user diversity
#
# With D antennas per user the per-user SNR is Gamma(D) instead of
# exponential. Each extra antenna already buys diversity, so fewer active
# users are worth their scheduling cost.

# %%
from mudiv import Modulation, multi_antenna_approx_ber
from mudiv.experiments import multi_antenna_sweep

qpsk = Modulation.qam(4)

# %%
for r in multi_antenna_sweep():
    print(f"D={r['d']}  K*={r['k_star']}  BER(K*)={r['ber_opt']:.3e}  BER(all users)={r['ber_ga']:.3e}")

# %%
print([f"{multi_antenna_approx_ber(qpsk, 5, 3.16, D):.2e}" for D in (1, 2, 4, 8)])
