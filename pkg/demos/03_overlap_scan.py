"""
Turning off the interference
============================

Slide one Gaussian away from the other in momentum. The overlap falls as
exp(-dp^2 / 8 sigma^2) and the largest interference term follows it to zero.
"""

import math

import numpy as np

from commonmodes import MomentumGrid, make_gaussian, overlap_set, position_sweep

sigma = 1.0
grid = MomentumGrid.uniform(-10.0, 30.0, 1024)
eta = make_gaussian(grid, 0.0, sigma)
xs = np.linspace(-8.0, 8.0, 161)

print(f"{'dp':>5} {'|c|':>10} {'closed form':>12} {'max |interf.|':>14}")
for dp in (0.0, 1.0, 2.0, 3.0, 4.0, 6.0, 10.0, 20.0):
    mu = make_gaussian(grid, dp, sigma)
    c = abs(overlap_set(eta, mu).c)
    worst = max(abs(r.interference) for r in position_sweep(eta, mu, xs, 0.0))
    print(f"{dp:5.1f} {c:10.3e} {math.exp(-dp**2 / (8 * sigma**2)):12.3e} {worst:14.3e}")
