"""
Brute-force second-quantized evaluation of the single-detection density.

Works in the occupation-number basis of a finite set of plane-wave modes and
applies bosonic ladder operators literally:

    a_k^+ |..n_k..> = sqrt(n_k + 1) |..n_k + 1..>
    a_k   |..n_k..> = sqrt(n_k)     |..n_k - 1..>

Continuum amplitudes on a grid with cell volume w map to mode amplitudes
f_k = f(p_k) sqrt(w) and a(p) -> a_k / sqrt(w), so the field operator becomes
psi(r, t) = (2 pi hbar)^(-d/2) sqrt(w) sum_k exp(i(p_k.r - E_k t)/hbar) a_k.
Nothing here calls into the analytic pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import IndexOutOfRange, LengthMismatch, NullState, TooManyModes, ValidationError
from .momentum_modes import NATURAL_UNITS, PhysicalConstants, check_same_grid

DEFAULT_MAX_MODES = 16


@dataclass(frozen=True)
class DiscreteModeSet:
    """Momenta of the modes kept by the oracle, shape ``(M, d)``."""

    modes: np.ndarray
    constants: PhysicalConstants = NATURAL_UNITS

    def __post_init__(self):
        modes = np.array(self.modes, dtype=float)
        if modes.ndim == 1:
            modes = modes[:, None]
        if modes.ndim != 2 or len(modes) < 1:
            raise ValidationError("need at least one mode")
        if len(np.unique(modes, axis=0)) != len(modes):
            raise ValidationError("modes must be pairwise distinct")
        modes.setflags(write=False)
        object.__setattr__(self, "modes", modes)

    @property
    def count(self) -> int:
        return len(self.modes)


@dataclass(frozen=True, eq=False)
class FockState:
    """Sparse vector over occupation tuples, all with the same particle number."""

    n_modes: int
    coefficients: Mapping[tuple, complex] = field(default_factory=dict)

    def __post_init__(self):
        coeffs = {}
        totals = set()
        for occ, amp in self.coefficients.items():
            occ = tuple(int(n) for n in occ)
            if len(occ) != self.n_modes or min(occ) < 0:
                raise ValidationError(f"bad occupation vector {occ}")
            if amp != 0:
                coeffs[occ] = coeffs.get(occ, 0) + complex(amp)
                totals.add(sum(occ))
        if len(totals) > 1:
            raise ValidationError(f"mixed particle numbers {sorted(totals)}")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def vacuum(cls, n_modes: int) -> "FockState":
        return cls(n_modes, {(0,) * n_modes: 1.0})

    @property
    def particles(self) -> int | None:
        """Particle number, or None for the zero vector."""
        for occ in self.coefficients:
            return sum(occ)
        return None

    @property
    def dimension(self) -> int:
        return len(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def norm_squared(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.coefficients.values()))

    def inner(self, other: "FockState") -> complex:
        """<self|other>."""
        return complex(sum(np.conj(a) * other.coefficients.get(occ, 0)
                           for occ, a in self.coefficients.items()))

    def __add__(self, other: "FockState") -> "FockState":
        merged = dict(self.coefficients)
        for occ, a in other.coefficients.items():
            merged[occ] = merged.get(occ, 0) + a
        return FockState(self.n_modes, merged)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "FockState":
        return FockState(self.n_modes, {k: v * factor for k, v in self.coefficients.items()})

    @cached_property
    def one_body_density(self) -> np.ndarray:
        """Matrix rho[k, l] = <self| a_k^+ a_l |self>."""
        lowered = [apply_annihilation(self, k) for k in range(self.n_modes)]
        rho = np.empty((self.n_modes, self.n_modes), dtype=complex)
        for k, bra in enumerate(lowered):
            for l, ket in enumerate(lowered):
                rho[k, l] = bra.inner(ket)
        return rho


def _check_index(state: FockState, k: int) -> None:
    if not 0 <= k < state.n_modes:
        raise IndexOutOfRange(f"mode index {k} outside 0..{state.n_modes - 1}")


def apply_creation(state: FockState, k: int) -> FockState:
    _check_index(state, k)
    out = {}
    for occ, amp in state.coefficients.items():
        n = occ[k]
        raised = occ[:k] + (n + 1,) + occ[k + 1:]
        out[raised] = out.get(raised, 0) + amp * math.sqrt(n + 1)
    return FockState(state.n_modes, out)


def apply_annihilation(state: FockState, k: int) -> FockState:
    """a_k applied linearly; basis states with n_k = 0 are sent to zero."""
    _check_index(state, k)
    out = {}
    for occ, amp in state.coefficients.items():
        n = occ[k]
        if n == 0:
            continue
        lowered = occ[:k] + (n - 1,) + occ[k + 1:]
        out[lowered] = out.get(lowered, 0) + amp * math.sqrt(n)
    return FockState(state.n_modes, out)


def apply_orbital_creation(state: FockState, amplitudes) -> FockState:
    """sum_k f_k a_k^+ |state>."""
    result = FockState(state.n_modes)
    for k, f in enumerate(amplitudes):
        if f != 0:
            result = result + apply_creation(state, k).scaled(f)
    return result


def build_state(eta_amps, mu_amps, modes: DiscreteModeSet | None = None) -> FockState:
    """|I> = sum_{k,l} eta_k mu_l a_k^+ a_l^+ |0>, built by acting on the vacuum."""
    eta_amps = np.asarray(eta_amps, dtype=complex)
    mu_amps = np.asarray(mu_amps, dtype=complex)
    m = len(eta_amps)
    if len(mu_amps) != m or (modes is not None and modes.count != m):
        raise LengthMismatch(
            f"eta has {len(eta_amps)} amplitudes, mu has {len(mu_amps)}"
            + ("" if modes is None else f", mode set has {modes.count}"))
    one = apply_orbital_creation(FockState.vacuum(m), mu_amps)
    return apply_orbital_creation(one, eta_amps)


def field_coefficients(modes: DiscreteModeSet, position, time: float, volume_weight: float) -> np.ndarray:
    """g_k with psi(r, t) = sum_k g_k a_k on the discrete mode set."""
    hbar, mass = modes.constants.hbar, modes.constants.mass
    p = modes.modes
    r = np.atleast_1d(np.asarray(position, dtype=float))
    if r.size != p.shape[1]:
        raise ValidationError(f"position dimension {r.size} does not match modes ({p.shape[1]})")
    energy = np.einsum("ij,ij->i", p, p) / (2 * mass)
    d = p.shape[1]
    pref = (2 * math.pi * hbar) ** (-d / 2) * math.sqrt(volume_weight)
    return pref * np.exp(1j * (p @ r - energy * time) / hbar)


def expectation_density_complex(state: FockState, modes: DiscreteModeSet, at, volume_weight: float) -> complex:
    """<I|psi^+ psi|I> / <I|I> before discarding the imaginary part."""
    norm = state.norm_squared()
    if norm == 0.0:
        raise NullState("expectation in the zero vector")
    g = field_coefficients(modes, at.position, at.time, volume_weight)
    return complex(np.conj(g) @ state.one_body_density @ g / norm)


def expectation_density(state: FockState, modes: DiscreteModeSet, at, volume_weight: float) -> float:
    """Single-detection density <I|psi^+(r,t) psi(r,t)|I> / <I|I> at ``at``."""
    return expectation_density_complex(state, modes, at, volume_weight).real


def number_expectation(state: FockState) -> float:
    """sum_k <a_k^+ a_k> / <I|I>; two for any two-particle state."""
    norm = state.norm_squared()
    if norm == 0.0:
        raise NullState("expectation in the zero vector")
    return float(np.trace(state.one_body_density).real / norm)


@dataclass(frozen=True)
class OracleProblem:
    """Two grid distributions restricted to their joint support."""

    state: FockState
    modes: DiscreteModeSet
    volume_weight: float
    indices: np.ndarray

    def density(self, at) -> float:
        return expectation_density(self.state, self.modes, at, self.volume_weight)


def from_distributions(eta, mu, constants: PhysicalConstants = NATURAL_UNITS,
                       max_modes: int = DEFAULT_MAX_MODES) -> OracleProblem:
    """Set up the oracle for two ModeDistributions sharing a grid.

    Modes where both amplitudes vanish never get populated, so only the union
    of the two supports is kept.
    """
    check_same_grid(eta, mu)
    grid = eta.grid
    idx = np.union1d(np.flatnonzero(eta.amplitudes), np.flatnonzero(mu.amplitudes))
    if len(idx) == 0:
        raise NullState("both distributions are zero")
    if len(idx) > max_modes:
        raise TooManyModes(f"{len(idx)} populated modes exceeds the oracle cap of {max_modes}")
    w = grid.weight
    root_w = math.sqrt(w)
    modes = DiscreteModeSet(grid.points[idx], constants)
    state = build_state(eta.amplitudes[idx] * root_w, mu.amplitudes[idx] * root_w, modes)
    return OracleProblem(state, modes, w, idx)
