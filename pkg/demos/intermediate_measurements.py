"""
Measuring the control qubit along the way
=========================================

Every l steps the control qubit is measured. Outcome 0 can only happen on the
target, so the run stops there with success. Outcome 1 lets the walk go on
from the collapsed state. Only one branch ever survives, so the cumulative
success probability P_c is computed exactly from a single state evolution.

"""

from qwalk import GridGeometry, IMAConfig, run_ima_deterministic, run_ima_monte_carlo, run_unitary
from qwalk.analysis import resolve_lapse

geom = GridGeometry(12)
N = geom.n_positions

###############################################################################
# P_c at the standard step count for a range of lapses.
unitary = run_unitary(IMAConfig(geom)).final_cumulative
print(f"unitary       P_c = {unitary:.3f}")
for rule in ("1", "sqrtN", "sqrtN/2", "sqrtN/4", "sqrtN/8"):
    lapse = resolve_lapse(rule, N)
    trace = run_ima_deterministic(IMAConfig(geom, lapse=lapse))
    print(f"l = {rule:8s} ({lapse:2d}) P_c = {trace.final_cumulative:.3f}")

###############################################################################
# The conditioned target probability decays between measurements like a
# damped oscillator, while the booked probability keeps growing.
trace = run_ima_deterministic(IMAConfig(geom, lapse=4, k_max=600))
for k in range(0, 601, 100):
    print(f"k = {k:3d}  P_t = {trace.p_target[k]:.4f}  stopped = {trace.stopped[k]:.4f}  P_c = {trace.p_cumulative[k]:.4f}")

###############################################################################
# Sampling whole experiments agrees with the exact value.
cfg = IMAConfig(GridGeometry(8), lapse=8, mode="monte_carlo", trials=50_000, seed=3)
freq, se = run_ima_monte_carlo(cfg)
exact = run_ima_deterministic(cfg).final_cumulative
print(f"Monte Carlo {freq:.4f} +- {se:.4f}, exact {exact:.4f}, z = {(freq - exact) / se:+.2f}")
