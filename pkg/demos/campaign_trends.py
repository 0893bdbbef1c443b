"""Seed-averaged sweep over the cluster size, smaller than the full runs
but showing the same two trends: admitted counts fall as clusters widen
(denser conflicts), while served counts peak at a middling size.

Writes sweep.csv next to this script when --out is passed.
"""

import sys

from ucran import SimConfig, run_campaign

num_seeds = 20
budgets = [4, 8]
sizes = [2, 3, 4, 5, 6]
out = "sweep.csv" if "--out" in sys.argv else None

report = run_campaign(SimConfig(), sizes, budgets,
                      algorithms=("proposed", "con", "perfect"),
                      num_seeds=num_seeds, out_csv=out)

for budget in budgets:
    print(f"pilot budget {budget}, {num_seeds} seeds per point")
    print("  L | proposed adm | con adm | proposed served | perfect served")
    for size in sizes:
        prop = report.cells[("proposed", size, budget)]
        con = report.cells[("con", size, budget)]
        perf = report.cells[("perfect", size, budget)]
        print(f"  {size} | {prop.mean_admitted:12.2f} | {con.mean_admitted:7.2f} "
              f"| {prop.mean_served:15.2f} | {perf.mean_served:.2f}")
    print()

if out:
    print(f"rows written to {out}")
