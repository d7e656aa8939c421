"""
Correlations between control, coin and position
===============================================

The global state stays pure, so every entropy involving the position register
is read off its small complement. Right after a measurement the control is
in a pure state and every correlation that isolates it vanishes.

"""

import numpy as np

from qwalk import CorrelationKind as K
from qwalk import GridGeometry, IMAConfig, run_ima_deterministic, run_unitary
from qwalk.correlations import odd_window, smooth

geom = GridGeometry(12)
lapse = 32

###############################################################################
# Control-isolating correlations right after each collapse.
kinds = (K.MI_CTR_REST, K.MI_CTR_POS, K.MI_CTR_COIN)
trace = run_ima_deterministic(IMAConfig(geom, lapse=lapse), correlations=kinds)
for kind in kinds:
    after = np.abs(trace.correlations[kind.value][trace.is_measurement]).max()
    print(f"{kind.value:14s} max after collapse = {after:.1e}, max overall = {trace.correlations[kind.value].max():.3f}")

###############################################################################
# Long runs: the three position-related correlations settle to one value.
late_kinds = (K.MI_POSCTR_COIN, K.MI_CTRCOIN_POS, K.MI_COIN_POS)
long = run_ima_deterministic(IMAConfig(geom, lapse=lapse, k_max=1200), correlations=late_kinds)
w = odd_window(lapse)
for k in (100, 400, 800, 1200):
    vals = "  ".join(f"{kind.value}={smooth(long.correlations[kind.value], w)[k]:.3f}" for kind in late_kinds)
    print(f"k = {k:4d}  {vals}")

###############################################################################
# In the unitary run the coin-position correlation dips when P_t peaks.
uni = run_unitary(IMAConfig(geom), correlations=(K.MI_COIN_POS,))
k_peak = int(np.argmax(uni.p_target))
mi = smooth(uni.correlations[K.MI_COIN_POS.value], 5)
window = slice(max(k_peak - 40, 1), k_peak + 40)
k_dip = window.start + int(np.argmin(mi[window]))
print(f"P_t peaks at k = {k_peak}; smoothed MI_coin_pos dips at k = {k_dip}")
