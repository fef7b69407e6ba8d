"""
Interference from common modes
==============================

Two independent sources each emit one boson in a Gaussian wavepacket. When
the momentum distributions overlap, the single-detection density at a fixed
point is not the sum of the two single-source densities.
"""

import numpy as np

from commonmodes import MomentumGrid, make_gaussian, overlap_set, position_sweep

grid = MomentumGrid.uniform(-10.0, 10.0, 512)

# eta centred at p = 0, mu at p = 1; both start near the origin
eta = make_gaussian(grid, center=0.0, width=1.0, carrier_phase=0.0)
mu = make_gaussian(grid, center=1.0, width=1.0, carrier_phase=0.5)

ov = overlap_set(eta, mu)
print(f"overlap |c| = {abs(ov.c):.4f}, <I|I> = {ov.state_norm:.4f}")

# %%
# The three-term breakdown along a line of detector positions
xs = np.linspace(-4.0, 4.0, 9)
for t in (0.0, 1.0):
    print(f"\nt = {t}")
    print(f"{'x':>6} {'total':>10} {'mu-mu':>10} {'eta-eta':>10} {'interf.':>10}")
    for x, r in zip(xs, position_sweep(eta, mu, xs, t)):
        print(f"{x:6.2f} {r.total:10.5f} {r.term_mu_mu:10.5f} {r.term_eta_eta:10.5f} {r.interference:10.5f}")

# %%
# Optional figure
try:
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    xs = np.linspace(-6.0, 6.0, 400)
    res = position_sweep(eta, mu, xs, 1.0)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.plot(xs, [r.total for r in res], label="total")
    ax.plot(xs, [r.independent_sum for r in res], "--", label="independent sources")
    ax.plot(xs, [r.interference for r in res], label="interference")
    ax.set_xlabel("detector position")
    ax.set_ylabel("single-detection density")
    ax.legend()
    fig.tight_layout()
    fig.savefig("common_modes.png", dpi=120)
    print("\nsaved common_modes.png")
