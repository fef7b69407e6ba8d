"""Interference in single-particle detection of two bosons emitted by independent
multimode sources, with a brute-force Fock-space oracle for validation."""

from .dynamics import (
    CrossAmplitude,
    SpacetimePoint,
    cross_amplitude,
    dispersion,
    gaussian_wavepacket,
    propagate,
    propagate_many,
)
from .errors import *  # noqa: F401,F403
from .interference import (
    DetectionResult,
    OverlapSet,
    detection_probability,
    overlap_set,
    position_sweep,
    state_norm_literal,
)
from .momentum_modes import (
    ModeDistribution,
    MomentumGrid,
    PhysicalConstants,
    inner_product,
    load_tabulated,
    make_discrete_modes,
    make_gaussian,
    normalize,
)

__version__ = "0.1.0"
