"""
Momentum-space mode distributions on uniform grids.

A mode distribution is a complex amplitude per plane-wave mode. Integrals over
momentum are evaluated with the midpoint rule: grid points sit at cell centres
and every point carries the same weight, the product of the per-axis spacings.
The same points double as the discrete mode set of the Fock-space oracle, so
a quadrature sum here is exactly a mode sum there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

from .errors import (
    GridMismatch,
    GridTooNarrow,
    NonpositiveWidth,
    OffGridMomentum,
    ValidationError,
    ZeroDistribution,
)

#: Squared-norm tolerance accepted for a "normalized" distribution.
NORM_TOL = 1e-9


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValidationError(f"hbar must be positive, got {self.hbar}")
        if not self.mass > 0:
            raise ValidationError(f"mass must be positive, got {self.mass}")


NATURAL_UNITS = PhysicalConstants()


def _as_tuple(value, dimension: int, name: str) -> tuple:
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.ndim != 1:
        raise ValidationError(f"{name} must be a scalar or a vector")
    if arr.size == 1 and dimension > 1:
        arr = np.repeat(arr, dimension)
    if arr.size != dimension:
        raise ValidationError(f"{name} has {arr.size} components, expected {dimension}")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class MomentumGrid:
    """Cell-centred uniform grid over a box in d-dimensional momentum space.

    Axis ``i`` is split into ``counts[i]`` cells of width
    ``(upper[i] - lower[i]) / counts[i]``; the points are the cell centres.
    Points are flattened in C order (last axis fastest).
    """

    lower: tuple
    upper: tuple
    counts: tuple

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        counts = tuple(int(v) for v in np.atleast_1d(self.counts))
        if not (len(lower) == len(upper) == len(counts)):
            raise ValidationError("lower, upper and counts must have the same length")
        if len(counts) not in (1, 2, 3):
            raise ValidationError(f"dimension must be 1, 2 or 3, got {len(counts)}")
        for i, (lo, hi, n) in enumerate(zip(lower, upper, counts)):
            if n < 2:
                raise ValidationError(f"axis {i}: need at least 2 points, got {n}")
            if not hi > lo:
                raise ValidationError(f"axis {i}: upper bound {hi} not above lower bound {lo}")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def uniform(cls, lower: float, upper: float, n: int, dimension: int = 1) -> "MomentumGrid":
        """Same bounds and point count on every axis."""
        return cls((lower,) * dimension, (upper,) * dimension, (n,) * dimension)

    @property
    def dimension(self) -> int:
        return len(self.counts)

    @property
    def spacing(self) -> np.ndarray:
        return (np.array(self.upper) - np.array(self.lower)) / np.array(self.counts)

    @property
    def weight(self) -> float:
        """Quadrature weight of a single point (cell volume)."""
        return float(np.prod(self.spacing))

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    @property
    def axes(self) -> list[np.ndarray]:
        return [
            lo + (np.arange(n) + 0.5) * dp
            for lo, n, dp in zip(self.lower, self.counts, self.spacing)
        ]

    @property
    def points(self) -> np.ndarray:
        """All grid points, shape ``(size, dimension)``."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def flat_index(self, index) -> int:
        """Flat point index from an int or a per-axis index tuple."""
        if np.ndim(index) == 0:
            flat = int(index)
            if not 0 <= flat < self.size:
                raise ValidationError(f"mode index {flat} outside grid of {self.size} points")
            return flat
        multi = tuple(int(i) for i in index)
        if len(multi) != self.dimension:
            raise ValidationError(f"mode index {multi} has wrong dimension")
        for i, n in zip(multi, self.counts):
            if not 0 <= i < n:
                raise ValidationError(f"mode index {multi} outside grid")
        return int(np.ravel_multi_index(multi, self.counts))

    def locate(self, momentum, rtol: float = 1e-9) -> int:
        """Flat index of the grid point equal to ``momentum``.

        Raises OffGridMomentum when no point matches within ``rtol`` cell widths.
        """
        p = np.asarray(_as_tuple(momentum, self.dimension, "momentum"))
        spacing = self.spacing
        pos = (p - np.array(self.lower)) / spacing - 0.5
        idx = np.rint(pos)
        if np.any(np.abs(pos - idx) > rtol) or np.any(idx < 0) or np.any(idx >= self.counts):
            raise OffGridMomentum(f"momentum not on grid: {p.tolist()}")
        return int(np.ravel_multi_index(tuple(idx.astype(int)), self.counts))


@dataclass(frozen=True)
class GaussianModes:
    center: tuple
    width: float
    carrier_phase: tuple


@dataclass(frozen=True)
class DiscreteModes:
    modes: tuple  # ((flat_index, complex amplitude), ...)


@dataclass(frozen=True)
class TabulatedModes:
    source: str = ""


Descriptor = Union[GaussianModes, DiscreteModes, TabulatedModes, None]


@dataclass(frozen=True, eq=False)
class ModeDistribution:
    """Complex amplitudes, one per grid point; the array is read-only."""

    grid: MomentumGrid
    amplitudes: np.ndarray
    descriptor: Descriptor = field(default=None)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != self.grid.size:
            raise ValidationError(
                f"{amps.size} amplitudes for a grid of {self.grid.size} points")
        if not np.all(np.isfinite(amps)):
            raise ValidationError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    def squared_norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.grid.weight)

    def is_normalized(self, tol: float = NORM_TOL) -> bool:
        return abs(self.squared_norm() - 1.0) <= tol

    def support(self) -> np.ndarray:
        """Flat indices of the non-zero amplitudes."""
        return np.flatnonzero(self.amplitudes)

    def mean_momentum(self) -> np.ndarray:
        prob = np.abs(self.amplitudes) ** 2 * self.grid.weight
        return prob @ self.grid.points / prob.sum()

    def scaled(self, factor: complex) -> "ModeDistribution":
        return ModeDistribution(self.grid, self.amplitudes * factor, self.descriptor)


def check_same_grid(a: ModeDistribution, b: ModeDistribution) -> None:
    if a.grid != b.grid:
        raise GridMismatch(f"distributions live on different grids: {a.grid} vs {b.grid}")


def normalize(dist: ModeDistribution) -> ModeDistribution:
    """Rescale by a positive real factor so the squared norm is one."""
    norm2 = dist.squared_norm()
    if norm2 == 0.0:
        raise ZeroDistribution("cannot normalize an all-zero distribution")
    return dist.scaled(1.0 / math.sqrt(norm2))


def inner_product(a: ModeDistribution, b: ModeDistribution) -> complex:
    """Quadrature of ``conj(a(p)) * b(p)`` over the shared grid."""
    check_same_grid(a, b)
    return complex(np.vdot(a.amplitudes, b.amplitudes) * a.grid.weight)


def make_gaussian(
    grid: MomentumGrid,
    center,
    width: float,
    carrier_phase=0.0,
    constants: PhysicalConstants = NATURAL_UNITS,
) -> ModeDistribution:
    """Normalized Gaussian ``exp(-|p - center|^2 / (4 width^2) - i p.x0 / hbar)``.

    ``width`` is the standard deviation of ``|amplitude|^2`` along each axis and
    ``carrier_phase`` (x0) is where the packet sits in position space at t = 0.
    """
    if not width > 0:
        raise NonpositiveWidth(f"width must be positive, got {width}")
    d = grid.dimension
    p0 = np.array(_as_tuple(center, d, "center"))
    x0 = np.array(_as_tuple(carrier_phase, d, "carrier_phase"))
    lo, hi = np.array(grid.lower), np.array(grid.upper)
    if np.any(p0 < lo) or np.any(p0 > hi):
        raise GridTooNarrow(f"center {p0.tolist()} outside grid bounds")
    if np.any(p0 - 5 * width < lo) or np.any(p0 + 5 * width > hi):
        raise GridTooNarrow(
            f"grid must extend 5 widths ({5 * width:g}) around center {p0.tolist()}")

    p = grid.points
    amps = np.exp(-np.sum((p - p0) ** 2, axis=1) / (4 * width**2)
                  - 1j * (p @ x0) / constants.hbar)
    desc = GaussianModes(tuple(p0), float(width), tuple(x0))
    return normalize(ModeDistribution(grid, amps, desc))


def make_discrete_modes(grid: MomentumGrid, modes: Sequence, normalized: bool = True) -> ModeDistribution:
    """Distribution that is non-zero only on the listed ``(index, amplitude)`` modes.

    Indices are flat point indices or per-axis index tuples. Repeated indices
    are rejected.
    """
    amps = np.zeros(grid.size, dtype=complex)
    listed = []
    for index, amp in modes:
        k = grid.flat_index(index)
        if any(k == j for j, _ in listed):
            raise ValidationError(f"mode index {index} listed twice")
        amps[k] = complex(amp)
        listed.append((k, complex(amp)))
    dist = ModeDistribution(grid, amps, DiscreteModes(tuple(listed)))
    if normalized:
        dist = normalize(dist)
        desc = DiscreteModes(tuple((k, complex(dist.amplitudes[k])) for k, _ in listed))
        dist = ModeDistribution(grid, dist.amplitudes, desc)
    return dist


def from_records(grid: MomentumGrid, records, normalized: bool = True, source: str = "") -> ModeDistribution:
    """Build a tabulated distribution from ``(momentum..., re, im)`` rows.

    Every momentum must coincide with a grid point; there is no interpolation.
    Points not listed get amplitude zero.
    """
    d = grid.dimension
    amps = np.zeros(grid.size, dtype=complex)
    seen = set()
    for row in records:
        row = tuple(float(v) for v in row)
        if len(row) != d + 2:
            raise ValidationError(f"record {row} needs {d} momenta plus re and im")
        k = grid.locate(row[:d])
        if k in seen:
            raise ValidationError(f"momentum {row[:d]} tabulated twice")
        seen.add(k)
        amps[k] = complex(row[d], row[d + 1])
    dist = ModeDistribution(grid, amps, TabulatedModes(source))
    return normalize(dist) if normalized else dist


def load_tabulated(path, grid: MomentumGrid, normalized: bool = True) -> ModeDistribution:
    """Read a whitespace-separated amplitude table; '#' lines are comments."""
    path = Path(path)
    records = []
    with path.open() as fh:
        for lineno, line in enumerate(fh, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                records.append([float(tok) for tok in text.split()])
            except ValueError as exc:
                raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return from_records(grid, records, normalized=normalized, source=str(path))


def save_tabulated(path, dist: ModeDistribution, skip_zeros: bool = True) -> None:
    """Write ``dist`` in the format read by :func:`load_tabulated`."""
    pts = dist.grid.points
    with Path(path).open("w") as fh:
        fh.write("# " + " ".join(f"p{i + 1}" for i in range(dist.grid.dimension)) + " re im\n")
        for p, a in zip(pts, dist.amplitudes):
            if skip_zeros and a == 0:
                continue
            cols = [*p, a.real, a.imag]
            fh.write(" ".join(f"{v:.17g}" for v in cols) + "\n")
