"""
Twisting the degenerate soliton
===============================

u0 = exp(i r x) phi_{1, 2 kappa0} keeps the threshold mass and gets
momentum -r M*.  The ratio c(r) = E M / P^2 decreases towards 1/2; in fact
c(r) = 1/2 + kappa0 / r.
"""

from dnlslab.experiments import remark33_sweep

rs = (1, 2, 5, 10, 20, 50, 100)
for b in (0.0, 0.5, 1.0):
    rows = remark33_sweep(rs, b).tables["remark33.csv"].rows
    print(f"b = {b}")
    for r in rows:
        print(f"   r = {r['r']:5g}   P/M* = {r['momentum'] / r['threshold_mass']:+9.4f}"
              f"   c(r) = {r['c_r']:.12f}   1/2 + kappa0/r = {r['c_r_closed_form']:.12f}")

# for b = 0 (kappa0 = 1) the offset at r = 50 is exactly 1/50
