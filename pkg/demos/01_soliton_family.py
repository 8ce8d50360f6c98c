"""
The soliton family and its degenerate member
============================================

Build a few solitons on both branches, check the energy/momentum identity
and locate the degenerate speed ratio kappa0(b) for several b.
"""

import math

import numpy as np

from dnlslab import SolitonParams, SpectralGrid, build_soliton, kappa0, soliton_parts
from dnlslab.functionals import parts_of

grid = SpectralGrid(40.0, 2048)

# exponential-branch solitons: E + (c/4) P should vanish to rounding
print("omega      c      b        E            P        E + cP/4")
for omega, c, b in [(1, 1, 0), (1, -1, 0.5), (2, 1, 1), (9, -3, 0.2)]:
    params = SolitonParams(omega, c, b)
    p = parts_of(grid, build_soliton(params, grid))
    e, mom = p.energy(b), p.momentum
    print(f"{omega:5g} {c:6g} {b:6g}  {e:+.6e} {mom:+.6e}  {e + c * mom / 4:+.1e}")

# the algebraic soliton (c = 2 sqrt(omega)) decays like 1/x, so its grid
# integrals need analytic tails; with them the mass is 4 pi / sqrt(gamma)
params = SolitonParams(1.0, 2.0, 0.0)
for L in (25.0, 100.0, 400.0):
    g = SpectralGrid(L, int(40 * L) // 2 * 2)
    raw = g.integrate(np.abs(build_soliton(params, g)) ** 2)
    corrected = soliton_parts(params, g).mass
    print(f"L = {L:5g}: raw mass error {raw - 4 * math.pi:+.2e}, tail-corrected {corrected - 4 * math.pi:+.2e}")

# degenerate speed ratio: E and P vanish together at c = 2 kappa0 sqrt(omega)
print("\n   b      kappa0          M*          kappa0 sqrt(1+kappa0^2) - kappa0^2")
for b in (0.0, 0.25, 0.5, 1.0, 2.0, 4.0):
    info = kappa0(b)
    print(f"{b:5g}  {info.kappa0:.12f}  {info.threshold_mass:.10f}  {info.corollary_constant:.10f}")
