#!/usr/bin/env python3
"""Search for the best grouped sequence at a fixed photon budget.

Reproduces the small end of the sequence-optimization study at eta = 0.6:
for each total photon number the best (N1, N2, chi2, N4, chi4) split is
compared with the all-single-photon baseline (the SQL).  Multi-photon
states start paying off only beyond nine photons.  N = 9 takes a few
seconds; pass a larger budget on the command line if you have minutes.
"""

import os
import sys
import time

from lossyphase.optimizer import optimize, pareto_csv, sql_baseline

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

ETA = 0.6
max_n = int(sys.argv[1]) if len(sys.argv) > 1 else 9

print(f"{'N':>3} {'best plan (n1,n2,chi2,n4,chi4)':>32} {'V_H':>10} "
      f"{'SQL V_H':>10} {'gain %':>7} {'secs':>6}")
for total in range(1, max_n + 1):
    t0 = time.time()
    res = optimize(total, ETA, chi_grid_step=0.1)
    sql = sql_baseline(total, ETA)
    p = res.best_plan
    gain = (sql - res.best_variance) / sql * 100.0
    print(f"{total:>3} ({p.n1},{p.n2},{p.chi2},{p.n4},{p.chi4})".ljust(37)
          + f"{res.best_variance:10.6f} {sql:10.6f} {gain:7.3f} {time.time()-t0:6.1f}")
    if total == max_n:
        path = os.path.join(OUT, f"pareto_n{total}.csv")
        with open(path, "w") as fh:
            fh.write(pareto_csv(res))
        print(f"\nfull table for N={total} written to {path}")
