"""
Free Schroedinger evolution of plane-wave mode distributions.

A distribution f(p) evolves into the position amplitude

    psi_f(r, t) = (2 pi hbar)^(-d/2) sum_p w f(p) exp(i (p.r - E(p) t) / hbar)

with E(p) = |p|^2 / 2m and w the grid cell volume. The cross function of two
distributions is a double sum over p and q, but it separates exactly into
conj(psi_a) * psi_b, which is how it is evaluated here.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import OscillationWarning, ValidationError
from .momentum_modes import (
    NATURAL_UNITS,
    GaussianModes,
    ModeDistribution,
    PhysicalConstants,
    check_same_grid,
)

# cap on the (positions x modes) phase matrix built in one go
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class SpacetimePoint:
    position: tuple
    time: float = 0.0

    def __post_init__(self):
        pos = tuple(float(v) for v in np.atleast_1d(self.position))
        object.__setattr__(self, "position", pos)
        object.__setattr__(self, "time", float(self.time))

    @property
    def dimension(self) -> int:
        return len(self.position)


@dataclass(frozen=True)
class CrossAmplitude:
    value: complex

    def conjugate(self) -> "CrossAmplitude":
        return CrossAmplitude(self.value.conjugate())

    def __complex__(self):
        return complex(self.value)


def dispersion(momentum, constants: PhysicalConstants = NATURAL_UNITS):
    """Kinetic energy |p|^2 / 2m. Accepts one vector or an (n, d) array."""
    p = np.asarray(momentum, dtype=float)
    if p.ndim == 0:
        return float(p**2 / (2 * constants.mass))
    e = np.sum(p**2, axis=-1) / (2 * constants.mass)
    return float(e) if np.ndim(e) == 0 else e


def check_phase_resolution(grid, positions, time: float, constants: PhysicalConstants) -> bool:
    """Warn when phases change by more than pi/4 between neighbouring cells.

    Returns True when the resolution is adequate.
    """
    positions = np.atleast_2d(positions)
    spacing = grid.spacing
    pmax = np.maximum(np.abs(grid.lower), np.abs(grid.upper))
    r_phase = np.max(np.abs(positions), axis=0) * spacing / constants.hbar
    t_phase = pmax * spacing * abs(time) / (constants.mass * constants.hbar)
    worst = max(float(np.max(r_phase)), float(np.max(t_phase)))
    if worst > math.pi / 4:
        warnings.warn(
            f"quadrature phase changes by {worst:.3g} rad per grid cell (> pi/4); "
            "refine the momentum grid or expect degraded accuracy",
            OscillationWarning, stacklevel=3)
        return False
    return True


def _positions(dist: ModeDistribution, positions) -> np.ndarray:
    pos = np.asarray(positions, dtype=float)
    d = dist.grid.dimension
    if pos.ndim == 1 and d == 1:
        pos = pos[:, None]
    pos = np.atleast_2d(pos)
    if pos.shape[1] != d:
        raise ValidationError(f"positions have dimension {pos.shape[1]}, grid has {d}")
    return pos


def propagate_many(dist: ModeDistribution, positions, time: float,
                   constants: PhysicalConstants = NATURAL_UNITS) -> np.ndarray:
    """Position amplitudes of ``dist`` at many positions and one time."""
    pos = _positions(dist, positions)
    check_phase_resolution(dist.grid, pos, time, constants)
    grid = dist.grid
    support = dist.support()
    p = grid.points[support]
    amps = dist.amplitudes[support]
    hbar = constants.hbar
    # time phase is shared by every position
    weighted = amps * np.exp(-1j * dispersion(p, constants) * time / hbar)
    prefactor = grid.weight * (2 * math.pi * hbar) ** (-grid.dimension / 2)

    out = np.empty(len(pos), dtype=complex)
    step = max(1, _CHUNK_ELEMENTS // max(1, len(p)))
    for start in range(0, len(pos), step):
        chunk = pos[start:start + step]
        out[start:start + step] = np.exp(1j * (chunk @ p.T) / hbar) @ weighted
    return prefactor * out


def propagate(dist: ModeDistribution, at: SpacetimePoint,
              constants: PhysicalConstants = NATURAL_UNITS) -> complex:
    """Single-particle amplitude psi(r, t) of the wavepacket described by ``dist``."""
    return complex(propagate_many(dist, [at.position], at.time, constants)[0])


def cross_amplitude(a: ModeDistribution, b: ModeDistribution, at: SpacetimePoint,
                    constants: PhysicalConstants = NATURAL_UNITS) -> CrossAmplitude:
    """P_ab(r, t) = conj(psi_a(r, t)) * psi_b(r, t)."""
    check_same_grid(a, b)
    return CrossAmplitude(propagate(a, at, constants).conjugate() * propagate(b, at, constants))


def cross_amplitude_double_sum(a: ModeDistribution, b: ModeDistribution, at: SpacetimePoint,
                               constants: PhysicalConstants = NATURAL_UNITS) -> complex:
    """Unfactored O(N^2) double sum over (p, q); a validation reference only."""
    check_same_grid(a, b)
    grid = a.grid
    pts = grid.points
    r = np.asarray(at.position)
    hbar = constants.hbar
    kr = pts @ r
    energy = dispersion(pts, constants)
    # exponent i((q - p).r - (E(q) - E(p)) t) / hbar, p on rows, q on columns
    phase = ((kr[None, :] - kr[:, None])
             - (energy[None, :] - energy[:, None]) * at.time) / hbar
    terms = np.conj(a.amplitudes)[:, None] * b.amplitudes[None, :] * np.exp(1j * phase)
    return complex(terms.sum() * grid.weight**2 / (2 * math.pi * hbar) ** grid.dimension)


def gaussian_wavepacket(positions, time: float, center, width: float, carrier_phase=0.0,
                        constants: PhysicalConstants = NATURAL_UNITS) -> np.ndarray:
    """Closed-form free evolution of the continuum Gaussian made by ``make_gaussian``.

    Each axis contributes the Gaussian integral
    ``(2 pi hbar)^(-1/2) (2 pi s^2)^(-1/4) sqrt(pi/a) exp(b^2/4a - p0^2/4s^2)``
    with ``a = 1/4s^2 + i t/2m hbar`` and ``b = p0/2s^2 + i(x - x0)/hbar``.
    """
    d = np.size(center)
    pos = np.asarray(positions, dtype=float)
    pos = pos.reshape(-1, 1) if d == 1 else np.atleast_2d(pos)
    p0 = np.broadcast_to(np.asarray(center, dtype=float), (d,))
    x0 = np.broadcast_to(np.asarray(carrier_phase, dtype=float), (d,))
    hbar, m, s = constants.hbar, constants.mass, float(width)
    a = 1 / (4 * s**2) + 1j * time / (2 * m * hbar)
    b = p0 / (2 * s**2) + 1j * (pos - x0) / hbar
    per_axis = ((2 * math.pi * hbar) ** -0.5 * (2 * math.pi * s**2) ** -0.25
                * np.sqrt(math.pi / a)
                * np.exp(b**2 / (4 * a) - p0**2 / (4 * s**2)))
    return np.prod(per_axis, axis=1)


def enclosing_box(sources, time: float, constants: PhysicalConstants = NATURAL_UNITS) -> np.ndarray:
    """Per-axis half-width of a centred box holding Gaussian packets at ``time``.

    For each source: ``|x0| + 5 s_x + |p0/m| |t| + 5 (s/m) |t|`` with
    ``s_x = hbar / 2s``; the box is the widest over all sources.
    """
    widths = []
    for src in sources:
        desc = src.descriptor if isinstance(src, ModeDistribution) else src
        if not isinstance(desc, GaussianModes):
            raise ValidationError("enclosing_box needs Gaussian sources")
        x0 = np.abs(np.asarray(desc.carrier_phase))
        p0 = np.abs(np.asarray(desc.center))
        s = desc.width
        sx = constants.hbar / (2 * s)
        t = abs(time)
        widths.append(x0 + 5 * sx + p0 / constants.mass * t + 5 * s / constants.mass * t)
    return np.max(widths, axis=0)


def position_grid(half_width, n: int, center=None):
    """Cell-centred position grid over ``center +- half_width``.

    Returns ``(points, weight)`` with points of shape ``(n**d, d)``.
    """
    hw = np.atleast_1d(np.asarray(half_width, dtype=float))
    c = np.zeros_like(hw) if center is None else np.broadcast_to(np.asarray(center, float), hw.shape)
    dx = 2 * hw / n
    axes = [ci - h + (np.arange(n) + 0.5) * step for ci, h, step in zip(c, hw, dx)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=-1), float(np.prod(dx))
