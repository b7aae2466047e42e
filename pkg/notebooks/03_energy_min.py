# %% [markdown]
# # Meeting a BER target with the least energy
#
# Now the SNR is fixed and the target is fixed; the question is the
# smallest K that still meets it. A delay-tolerant link defers when nothing
# works; a delay-sensitive one transmits with everybody anyway.

# %%
from mudiv import Modulation, SystemConfig, solve_kdt_min_energy, solve_kds_min_energy
from mudiv.experiments import dt_ds_sweep

qpsk = Modulation.qam(4)

# %%
for s in (0.0, 5.0, 10.0, 15.0):
    cfg = SystemConfig.from_snr_db(100, s, alpha=1.0)
    dt = solve_kdt_min_energy(cfg, qpsk, None, 1e-3)
    ds = solve_kds_min_energy(cfg, qpsk, None, 1e-3)
    print(f"{s:4.1f} dB  DT K={dt.k_star:3d} feasible={dt.feasible}  DS K={ds.k_star:3d}  "
          f"saving {ds.gain_vs_ga_db:5.2f} dB")

# %% [markdown]
# With log-normal shadowing on the channel mean, average over draws.

# %%
rows = dt_ds_sweep(lambda_db=(0, 5, 10, 15, 20), draws=500, seed=3)
print("lambda  K_dt   K_ds   BER_dt    BER_ds    P_dt   P_ds   outage")
for r in rows:
    print(f"{r['lambda_db']:5d}  {r['k_dt']:5.1f}  {r['k_ds']:5.1f}  {r['avg_ber_dt']:.2e}  {r['avg_ber_ds']:.2e}  "
          f"{r['norm_pt_dt']:.3f}  {r['norm_pt_ds']:.3f}  {r['outage_dt']:.3f}")
