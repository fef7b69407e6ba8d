"""
Single-particle detection density for two bosons from independent sources.

With c = <mu|eta> and N = 1 + |c|^2, the density at (r, t) is

    alpha_ee P_mm + alpha_mm P_ee + 2 Re(alpha_me P_em)

where alpha_ee = alpha_mm = 1/N, alpha_me = c/N and P_ab = conj(psi_a) psi_b.
The last term vanishes when the two distributions share no modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dynamics import SpacetimePoint, propagate_many
from .errors import NotNormalized
from .momentum_modes import (
    NATURAL_UNITS,
    ModeDistribution,
    PhysicalConstants,
    check_same_grid,
    inner_product,
)

#: squared-norm deviation tolerated on input distributions
INPUT_NORM_TOL = 1e-6


@dataclass(frozen=True)
class OverlapSet:
    c: complex
    state_norm: float
    alpha_mu_eta: complex
    alpha_eta_mu: complex
    alpha_eta_eta: complex
    alpha_mu_mu: complex


@dataclass(frozen=True)
class DetectionResult:
    """Detection density and its three-term breakdown.

    ``total`` is always computed as
    ``(term_mu_mu + term_eta_eta) + interference``.
    """

    total: float
    term_mu_mu: float
    term_eta_eta: float
    interference: float

    @classmethod
    def from_terms(cls, term_mu_mu: float, term_eta_eta: float, interference: float):
        return cls(term_mu_mu + term_eta_eta + interference,
                   term_mu_mu, term_eta_eta, interference)

    @property
    def independent_sum(self) -> float:
        return self.term_mu_mu + self.term_eta_eta


def _check_inputs(eta: ModeDistribution, mu: ModeDistribution) -> None:
    check_same_grid(eta, mu)
    for name, dist in (("eta", eta), ("mu", mu)):
        dev = abs(dist.squared_norm() - 1.0)
        if dev > INPUT_NORM_TOL:
            raise NotNormalized(f"{name} squared norm deviates from 1 by {dev:.3g}")


def overlap_set(eta: ModeDistribution, mu: ModeDistribution) -> OverlapSet:
    """Overlap c = <mu|eta>, state norm 1 + |c|^2 and the alpha coefficients."""
    _check_inputs(eta, mu)
    c = inner_product(mu, eta)
    norm = 1.0 + abs(c) ** 2
    return OverlapSet(
        c=c,
        state_norm=norm,
        alpha_mu_eta=c / norm,
        alpha_eta_mu=c.conjugate() / norm,
        alpha_eta_eta=complex(1.0 / norm),
        alpha_mu_mu=complex(1.0 / norm),
    )


def state_norm_literal(eta: ModeDistribution, mu: ModeDistribution) -> float:
    """<I|I> from the full double sum 1 + sum_pq eta*(p) mu*(q) eta(q) mu(p).

    O(N^2); kept to cross-check the 1 + |c|^2 shortcut.
    """
    check_same_grid(eta, mu)
    w = eta.grid.weight
    e, m = eta.amplitudes, mu.amplitudes
    # rows p, columns q
    terms = np.conj(e)[:, None] * np.conj(m)[None, :] * e[None, :] * m[:, None]
    value = 1.0 + terms.sum() * w * w
    return float(value.real)


def _assemble(ov: OverlapSet, psi_eta: np.ndarray, psi_mu: np.ndarray) -> list[DetectionResult]:
    p_mm = np.abs(psi_mu) ** 2
    p_ee = np.abs(psi_eta) ** 2
    p_em = np.conj(psi_eta) * psi_mu
    term_mm = ov.alpha_eta_eta.real * p_mm
    term_ee = ov.alpha_mu_mu.real * p_ee
    interf = 2.0 * (ov.alpha_mu_eta * p_em).real
    return [DetectionResult.from_terms(float(a), float(b), float(c))
            for a, b, c in zip(term_mm, term_ee, interf)]


def detection_probability(eta: ModeDistribution, mu: ModeDistribution, at: SpacetimePoint,
                          constants: PhysicalConstants = NATURAL_UNITS) -> DetectionResult:
    """Density of single-particle detections at ``at`` (number per unit volume)."""
    return position_sweep(eta, mu, [at.position], at.time, constants)[0]


def position_sweep(eta: ModeDistribution, mu: ModeDistribution, positions: Sequence,
                   time: float, constants: PhysicalConstants = NATURAL_UNITS) -> list[DetectionResult]:
    """:func:`detection_probability` at each position, in input order."""
    ov = overlap_set(eta, mu)
    if len(positions) == 0:
        return []
    psi_eta = propagate_many(eta, positions, time, constants)
    psi_mu = propagate_many(mu, positions, time, constants)
    return _assemble(ov, psi_eta, psi_mu)


def totals(results: Sequence[DetectionResult]) -> np.ndarray:
    return np.array([r.total for r in results])

