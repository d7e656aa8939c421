"""
Estimating the order of the search
==================================

Divide TS by sqrt(N) log2(N)^alpha. If the ratio levels off, the cost grows
like that function. Measuring at every step gives classical cost; the
unitary run with classical repetition grows like sqrt(N) log^1.5 N.

"""

import math

from qwalk.analysis import order_fit, sweep_order

exponents = (8, 10, 12, 14)

for rule in ("1", "unitary", "sqrtN", "sqrtN/4"):
    sweep = sweep_order(exponents, math.pi / 4, rule)
    ts_over_n = [f"{r.ts / r.n_positions:.3f}" for r in sweep.rows]
    print(f"l = {rule:8s} TS/N = {ts_over_n}")
    for alpha in (0.6, 0.9, 1.25, 1.5):
        fit = order_fit(sweep, alpha)
        print(f"    alpha = {alpha:4}: {[round(float(v), 3) for v in fit.values]}  top-3 max/min = {fit.flatness:.3f}")
