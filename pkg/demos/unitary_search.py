"""
Unitary controlled-walk search
==============================

A walker on a 2D torus searches for one marked vertex. The oracle entangles a
control qubit with the target, and the walk only moves the control=1 branch.
The angle delta sets how strongly the oracle tilts the control.

"""

import math

import numpy as np

from qwalk import GridGeometry, IMAConfig, run_unitary, t_delta, tulsi_delta

# A 64 x 64 torus.
geom = GridGeometry(12)
N = geom.n_positions
print(f"N = {N}, side = {geom.side}")

###############################################################################
# Three oracle angles. delta = 0 never touches the control and reduces to the
# plain walk search; the Tulsi angle maximizes the target probability.
angles = {"0": 0.0, "pi/4": math.pi / 4, "tulsi": tulsi_delta(N)}

for name, delta in angles.items():
    horizon = 2 * t_delta(geom, delta)
    trace = run_unitary(IMAConfig(geom, delta=delta, k_max=horizon))
    k_peak = int(np.argmax(trace.p_target))
    print(f"delta={name:6s} peak P_t = {trace.p_target[k_peak]:.3f} at k = {k_peak} (t_delta = {horizon // 2})")

###############################################################################
# With the Tulsi angle the peak height barely changes with N.
for n in (8, 10, 12, 14):
    g = GridGeometry(n)
    d = tulsi_delta(g.n_positions)
    tr = run_unitary(IMAConfig(g, delta=d, k_max=2 * t_delta(g, d)))
    print(f"N = 2^{n:2d}: max P_t = {tr.p_target.max():.3f}")
