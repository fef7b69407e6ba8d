"""
Checking the closed form against second quantization
====================================================

The Fock-space oracle builds |I> = sum eta_k mu_l a_k^+ a_l^+ |0> mode by mode
and evaluates <I|psi^+ psi|I>/<I|I> with explicit ladder operators. On the
same grid it has to agree with the three-term formula to rounding error.
"""

import warnings

import numpy as np

from commonmodes import MomentumGrid, OscillationWarning, SpacetimePoint, detection_probability, make_discrete_modes
from commonmodes import fock_oracle

# few-mode sources are exact sums, so the quadrature resolution warning does not apply
warnings.simplefilter("ignore", OscillationWarning)

rng = np.random.default_rng(0)
grid = MomentumGrid.uniform(-3.0, 3.0, 24)

# eta and mu share modes 10 and 12
eta = make_discrete_modes(grid, [(8, 1.0), (10, 0.5j), (12, -0.3)])
mu = make_discrete_modes(grid, [(10, 1.0), (12, 1.0 + 1.0j), (15, 0.2)])

problem = fock_oracle.from_distributions(eta, mu)
print(f"{problem.modes.count} modes, {problem.state.dimension} two-particle basis states")
print(f"<I|I> = {problem.state.norm_squared():.6f}")
print(f"total number = {fock_oracle.number_expectation(problem.state):.12f}")

# %%
worst = 0.0
for _ in range(200):
    at = SpacetimePoint(rng.uniform(-10, 10, 1), rng.uniform(0, 10))
    analytic = detection_probability(eta, mu, at).total
    worst = max(worst, abs(analytic - problem.density(at)) / abs(analytic))
print(f"max relative deviation over 200 points: {worst:.2e}")
