"""GERT: RFID tag-population estimation from framed slotted Aloha reader sequences."""

from gert.errors import (
    EmptyInput,
    GertError,
    InconsistentObservation,
    Infeasible,
    MixedFrameSizes,
    Saturated,
)
from gert.estimator import (
    AccuracySpec,
    ChannelParams,
    EstimateResult,
    FrameObservation,
    estimate,
    g,
    g_inverse,
    slot_probs,
    variance_z,
    z_statistic,
)
from gert.planner import FramePlan, PlannerConfig, plan

__all__ = [
    "AccuracySpec",
    "ChannelParams",
    "EmptyInput",
    "EstimateResult",
    "FrameObservation",
    "FramePlan",
    "GertError",
    "InconsistentObservation",
    "Infeasible",
    "MixedFrameSizes",
    "PlannerConfig",
    "Saturated",
    "estimate",
    "g",
    "g_inverse",
    "plan",
    "slot_probs",
    "variance_z",
    "z_statistic",
]

__version__ = "0.1.0"
