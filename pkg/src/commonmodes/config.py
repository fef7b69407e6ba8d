"""
Experiment configuration files.

A configuration is flat TOML with dotted keys, one setting per line::

    grid.lower = [-10.0]
    grid.upper = [10.0]
    grid.counts = [512]
    source_eta.kind = "gaussian"
    source_eta.center = [0.0]
    source_eta.width = 1.0
    source_mu.kind = "tabulated"
    source_mu.path = "mu.txt"
    evaluation.kind = "sweep"
    evaluation.box_lower = [-5.0]
    evaluation.box_upper = [5.0]
    evaluation.box_counts = [101]
    evaluation.times = [0.0, 1.0]

Unknown keys are rejected. Relative paths resolve against the directory of
the configuration file.
"""

from __future__ import annotations

import hashlib
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .dynamics import SpacetimePoint
from .errors import (
    CommonModesError,
    GridTooNarrow,
    NonpositiveWidth,
    OffGridMomentum,
    ParseError,
    ValidationError,
)
from .fock_oracle import DEFAULT_MAX_MODES
from .momentum_modes import (
    ModeDistribution,
    MomentumGrid,
    PhysicalConstants,
    load_tabulated,
    make_discrete_modes,
    make_gaussian,
)

SOURCE_KEYS = {
    "gaussian": {"kind", "center", "width", "carrier_phase"},
    "discrete": {"kind", "modes"},
    "tabulated": {"kind", "path"},
}
EVALUATION_KEYS = {
    "point": {"kind", "position", "time"},
    "sweep": {"kind", "box_lower", "box_upper", "box_counts", "times"},
    "time_sweep": {"kind", "position", "times"},
}
FIXED_KEYS = {
    "constants.hbar", "constants.mass",
    "grid.dimension", "grid.lower", "grid.upper", "grid.counts",
    "output.path",
    "oracle.enabled", "oracle.max_modes",
    "scan.separations",
    "check.points", "check.box_lower", "check.box_upper", "check.time_range",
}


@dataclass(frozen=True)
class SourceSpec:
    kind: str
    params: dict


@dataclass(frozen=True)
class EvaluationSpec:
    kind: str
    positions: np.ndarray  # (P, d)
    times: tuple

    def points(self) -> list[SpacetimePoint]:
        """Spacetime points in sweep order: time-major, positions in C order."""
        return [SpacetimePoint(r, t) for t in self.times for r in self.positions]


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    constants: PhysicalConstants
    grid: MomentumGrid
    source_eta: SourceSpec
    source_mu: SourceSpec
    eta: ModeDistribution
    mu: ModeDistribution
    evaluation: EvaluationSpec
    output_path: Path | None = None
    oracle: bool = False
    max_modes: int = DEFAULT_MAX_MODES
    scan_separations: tuple = ()
    check: dict = field(default_factory=dict)
    digest: str = ""
    base_dir: Path = Path(".")


def _flatten(table: dict, prefix: str = "") -> dict[str, Any]:
    flat = {}
    for key, value in table.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat


def _vector(flat, key, dimension, required=True, default=None) -> tuple:
    if key not in flat:
        if required:
            raise ValidationError(f"{key}: missing")
        return default
    value = flat[key]
    arr = np.atleast_1d(np.asarray(value, dtype=object))
    try:
        arr = arr.astype(float)
    except (TypeError, ValueError):
        raise ValidationError(f"{key}: expected numbers, got {value!r}") from None
    if arr.ndim != 1:
        raise ValidationError(f"{key}: expected a scalar or a list of numbers")
    if arr.size == 1 and dimension > 1:
        arr = np.repeat(arr, dimension)
    if arr.size != dimension:
        raise ValidationError(f"{key}: expected {dimension} components, got {arr.size}")
    return tuple(float(v) for v in arr)


def _number(flat, key, default=None, kind=float):
    if key not in flat:
        if default is None:
            raise ValidationError(f"{key}: missing")
        return default
    value = flat[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(f"{key}: expected a number, got {value!r}")
    if kind is int and value != int(value):
        raise ValidationError(f"{key}: expected an integer, got {value!r}")
    return kind(value)


def _source_spec(flat, name) -> SourceSpec:
    kind = flat.get(f"{name}.kind")
    if kind not in SOURCE_KEYS:
        raise ValidationError(f"{name}.kind: expected one of {sorted(SOURCE_KEYS)}, got {kind!r}")
    allowed = {f"{name}.{k}" for k in SOURCE_KEYS[kind]}
    present = {k for k in flat if k.startswith(name + ".")}
    extra = sorted(present - allowed)
    if extra:
        raise ValidationError(f"{extra[0]}: not a valid key for a {kind} source")
    return SourceSpec(kind, {k.split(".", 1)[1]: flat[k] for k in present if k != f"{name}.kind"})


def _build_source(name, spec: SourceSpec, grid, constants, base_dir) -> ModeDistribution:
    d = grid.dimension
    flat = {f"{name}.{k}": v for k, v in spec.params.items()}
    try:
        if spec.kind == "gaussian":
            width = _number(flat, f"{name}.width")
            if not width > 0:
                raise ValidationError(f"{name}.width: must be positive, got {width}")
            center = _vector(flat, f"{name}.center", d)
            phase = _vector(flat, f"{name}.carrier_phase", d, required=False, default=(0.0,) * d)
            return make_gaussian(grid, center, width, phase, constants)
        if spec.kind == "discrete":
            rows = flat.get(f"{name}.modes")
            if not isinstance(rows, list) or not rows:
                raise ValidationError(f"{name}.modes: expected a list of [index, re, im]")
            modes = []
            for row in rows:
                if not isinstance(row, list) or len(row) != 3:
                    raise ValidationError(f"{name}.modes: bad entry {row!r}, expected [index, re, im]")
                modes.append((row[0], complex(float(row[1]), float(row[2]))))
            return make_discrete_modes(grid, modes)
        path = flat.get(f"{name}.path")
        if not isinstance(path, str):
            raise ValidationError(f"{name}.path: missing")
        full = (base_dir / path) if not Path(path).is_absolute() else Path(path)
        if not full.is_file():
            raise ValidationError(f"{name}.path: file not found: {full}")
        return load_tabulated(full, grid)
    except OffGridMomentum as exc:
        raise ValidationError(f"{name}.path: {exc}") from None
    except ValidationError as exc:
        if str(exc).startswith(name):
            raise
        raise ValidationError(f"{name}: {exc}") from None
    except NonpositiveWidth as exc:
        raise ValidationError(f"{name}.width: {exc}") from None
    except GridTooNarrow as exc:
        raise ValidationError(f"{name}.center: {exc}") from None
    except CommonModesError as exc:
        raise ValidationError(f"{name}: {exc}") from None


def _evaluation(flat, d) -> EvaluationSpec:
    kind = flat.get("evaluation.kind")
    if kind not in EVALUATION_KEYS:
        raise ValidationError(
            f"evaluation.kind: expected one of {sorted(EVALUATION_KEYS)}, got {kind!r}")
    allowed = {f"evaluation.{k}" for k in EVALUATION_KEYS[kind]}
    extra = sorted(k for k in flat if k.startswith("evaluation.") and k not in allowed)
    if extra:
        raise ValidationError(f"{extra[0]}: not valid for evaluation.kind = {kind!r}")

    if kind == "sweep":
        lo = _vector(flat, "evaluation.box_lower", d)
        hi = _vector(flat, "evaluation.box_upper", d)
        counts = _vector(flat, "evaluation.box_counts", d)
        if any(c < 1 or c != int(c) for c in counts):
            raise ValidationError("evaluation.box_counts: must be positive integers")
        if any(h < l for l, h in zip(lo, hi)):
            raise ValidationError("evaluation.box_upper: below box_lower")
        axes = [np.linspace(l, h, int(c)) for l, h, c in zip(lo, hi, counts)]
        mesh = np.meshgrid(*axes, indexing="ij")
        positions = np.stack([m.ravel() for m in mesh], axis=-1)
    else:
        positions = np.array([_vector(flat, "evaluation.position", d)])

    if kind == "point":
        times = (_number(flat, "evaluation.time", default=0.0),)
    else:
        raw = flat.get("evaluation.times")
        if not isinstance(raw, list) or not raw:
            raise ValidationError("evaluation.times: expected a non-empty list")
        times = tuple(_number({"evaluation.times": t}, "evaluation.times") for t in raw)
    return EvaluationSpec(kind, positions, times)


def parse_config(text: str, base_dir: Path = Path("."), origin: str = "<string>") -> ExperimentConfig:
    try:
        table = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(f"{origin}: {exc}") from None
    flat = _flatten(table)

    known = set(FIXED_KEYS)
    for prefix in ("source_eta.", "source_mu.", "evaluation."):
        known |= {k for k in flat if k.startswith(prefix)}
    unknown = sorted(set(flat) - known)
    if unknown:
        raise ValidationError(f"{unknown[0]}: unknown key")

    hbar = _number(flat, "constants.hbar", default=1.0)
    mass = _number(flat, "constants.mass", default=1.0)
    if not hbar > 0:
        raise ValidationError(f"constants.hbar: must be positive, got {hbar}")
    if not mass > 0:
        raise ValidationError(f"constants.mass: must be positive, got {mass}")
    constants = PhysicalConstants(hbar, mass)

    if "grid.lower" not in flat:
        raise ValidationError("grid.lower: missing")
    d = _number(flat, "grid.dimension", default=len(np.atleast_1d(flat["grid.lower"])), kind=int)
    if d not in (1, 2, 3):
        raise ValidationError(f"grid.dimension: must be 1, 2 or 3, got {d}")
    lower = _vector(flat, "grid.lower", d)
    upper = _vector(flat, "grid.upper", d)
    counts = _vector(flat, "grid.counts", d)
    try:
        grid = MomentumGrid(lower, upper, tuple(int(c) for c in counts))
    except ValidationError as exc:
        raise ValidationError(f"grid: {exc}") from None

    specs = {name: _source_spec(flat, name) for name in ("source_eta", "source_mu")}
    dists = {name: _build_source(name, spec, grid, constants, base_dir)
             for name, spec in specs.items()}
    evaluation = _evaluation(flat, d)

    out = flat.get("output.path")
    if out is not None and not isinstance(out, str):
        raise ValidationError("output.path: expected a string")
    enabled = flat.get("oracle.enabled", False)
    if not isinstance(enabled, bool):
        raise ValidationError("oracle.enabled: expected true or false")
    max_modes = _number(flat, "oracle.max_modes", default=DEFAULT_MAX_MODES, kind=int)
    if max_modes < 1:
        raise ValidationError("oracle.max_modes: must be at least 1")
    seps = flat.get("scan.separations", [])
    if not isinstance(seps, list):
        raise ValidationError("scan.separations: expected a list")
    seps = tuple(_number({"scan.separations": s}, "scan.separations") for s in seps)

    check = {"points": _number(flat, "check.points", default=100, kind=int)}
    if check["points"] < 1:
        raise ValidationError("check.points: must be at least 1")
    all_pos = evaluation.positions
    check["box_lower"] = _vector(flat, "check.box_lower", d, required=False,
                                 default=tuple(all_pos.min(axis=0)))
    check["box_upper"] = _vector(flat, "check.box_upper", d, required=False,
                                 default=tuple(all_pos.max(axis=0)))
    check["time_range"] = _vector(flat, "check.time_range", 2, required=False,
                                  default=(min(evaluation.times), max(evaluation.times)))

    return ExperimentConfig(
        constants=constants, grid=grid,
        source_eta=specs["source_eta"], source_mu=specs["source_mu"],
        eta=dists["source_eta"], mu=dists["source_mu"],
        evaluation=evaluation,
        output_path=None if out is None else (base_dir / out),
        oracle=enabled, max_modes=max_modes, scan_separations=seps, check=check,
        digest=hashlib.sha256(text.encode()).hexdigest(), base_dir=base_dir,
    )


def load_config(path) -> ExperimentConfig:
    """Read and fully validate a configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from None
    return parse_config(text, base_dir=path.parent, origin=str(path))
