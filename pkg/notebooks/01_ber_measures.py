# %% [markdown]
# # Three ways to price the BER of K-user greedy access
#
# The scheduler picks the strongest of K active users, so the received SNR
# is the max of K exponentials. Below: the exact value (a one-dimensional
# angle integral), the bound that freezes the angle at pi/2, and the
# exponential-fit approximation, over SNR for a few K.

# %%
import numpy as np

from mudiv import Modulation, UbConvention, approx_ber, exact_ber, ub_ber

qpsk = Modulation.qam(4)
snr_db = np.arange(-10, 31, 5)

# %%
for K in (1, 10, 50):
    print(f"K = {K}")
    print("  SNR dB    exact        ub(1/pi)     ub(1/2)      approx")
    for s in snr_db:
        om = 10 ** (s / 10)
        print(f"  {s:6.1f}  {exact_ber(qpsk, K, om):.4e}  {ub_ber(qpsk, K, om):.4e}  "
              f"{ub_ber(qpsk, K, om, UbConvention.STRICT_HALF):.4e}  {approx_ber(qpsk, K, om):.4e}")

# %% [markdown]
# The 1/2-prefactor bound always sits above the exact curve; the 1/pi
# version can dip below it at low SNR. The approximation undershoots for
# K = 1 and tracks closely once several users compete.

# %%
# K is allowed to be real in the approximation, which the optimizer relies on
print([round(approx_ber(qpsk, k, 10.0), 6) for k in (2.0, 2.5, 3.0)])
