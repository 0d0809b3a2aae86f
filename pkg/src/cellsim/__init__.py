"""Multicell downlink scheduling simulator and analytical-bound toolkit."""

__version__ = "0.1.0"

from .channel import (
    Drop,
    NetworkGeometry,
    PathLossSpec,
    UserSample,
    draw_fading,
    drop_asymmetric,
    drop_symmetric,
    first_ring_geometry,
    path_gain,
    unequal_interferer_drop,
)
from .rng import RngStream
from .scheduling import SchedulerDecision, SchedulerKind, rate_gap, schedule, sinr

__all__ = [
    "Drop",
    "NetworkGeometry",
    "PathLossSpec",
    "RngStream",
    "SchedulerDecision",
    "SchedulerKind",
    "draw_fading",
    "drop_asymmetric",
    "drop_symmetric",
    "first_ring_geometry",
    "path_gain",
    "rate_gap",
    "schedule",
    "sinr",
    "unequal_interferer_drop",
]
