"""
Which lapse is cheapest?
========================

Each run succeeds with probability P_c, so reaching an overall success of P
needs log(1-P)/log(1-P_c) repetitions. The total step count TS is that times
k_max. Frequent measurements stop the search early; rare ones waste the
gains. The sweet spot sits near l = sqrt(N)/4.

"""

import math

from qwalk import GridGeometry
from qwalk.analysis import sweep_lapse

geom = GridGeometry(12)
side = geom.side
result = sweep_lapse(geom, math.pi / 4, [side // m for m in (1, 2, 4, 8, 16)], correlations=("MI_coin_pos",))

print(" m    l   P_c(k_max)     TS   k_opt  TS_opt  MI_coin_pos")
for row in result.rows:
    m = "-" if row.m is None else f"{row.m:g}"
    print(
        f"{m:>2s} {str(row.lapse):>7s} {row.p_c_final:8.3f} {row.ts:8.1f} {row.optimal_k:6d} "
        f"{row.ts_at_optimal:7.1f} {row.extras['MI_coin_pos@kmax']:8.3f}"
    )
best = min((r for r in result.rows if r.m is not None), key=lambda r: r.ts)
print(f"cheapest lapse: l = {best.lapse} (m = {best.m:g})")
