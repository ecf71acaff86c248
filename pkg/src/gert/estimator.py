"""Estimator math: slot occupancy probabilities, the expected statistic and its inverse.

A frame of ``f`` slots is read as a 0/1 sequence (empty / non-empty). The
per-frame statistic is ``z = (N_n - N_0) / f`` and its expectation for ``t``
tags replying with persistence ``p`` is ``g(t) = 1 - 2 (1 - p/f)**t``. The
population estimate inverts ``g`` at the mean of ``z`` over several rounds.

All powers are evaluated exactly as ``exp(t * log1p(-p/f))``; the ``e**-r``
shortcut is only used by the planner's bound ``k(r)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from gert.errors import (
    DomainError,
    EmptyInput,
    InconsistentObservation,
    MixedFrameSizes,
    Saturated,
)


@dataclass(frozen=True)
class AccuracySpec:
    """Accuracy contract ``P[|t_hat - t| <= beta * t] >= alpha``."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise DomainError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise DomainError(f"beta must lie in (0, 1), got {self.beta}")


@dataclass(frozen=True)
class ChannelParams:
    f: int
    p: float

    def __post_init__(self):
        if int(self.f) != self.f or self.f < 1:
            raise DomainError(f"frame size must be a positive integer, got {self.f}")
        if not 0.0 < self.p <= 1.0:
            raise DomainError(f"persistence probability must lie in (0, 1], got {self.p}")
        # p/f == 1 (f=1, p=1) is accepted: (1 - p/f)**t degenerates to 0**t but stays
        # well defined for the forward map; only g_inverse rejects it.

    @property
    def q(self) -> float:
        """Per-slot reply probability of one tag, ``p/f``."""
        return self.p / self.f


@dataclass(frozen=True, eq=False)
class FrameObservation:
    """One reader sequence. ``bits[j] == 1`` iff slot ``j`` was non-empty."""

    bits: np.ndarray
    n_zero: int
    n_nonempty: int
    z: float

    @classmethod
    def from_bits(cls, bits) -> "FrameObservation":
        b = np.asarray(bits, dtype=np.uint8)
        if b.ndim != 1 or b.size == 0:
            raise InconsistentObservation("bits must be a non-empty 1-d sequence")
        if np.any(b > 1):
            raise InconsistentObservation("bits must be 0 or 1")
        b.setflags(write=False)
        nn = int(b.sum())
        f = int(b.size)
        return cls(bits=b, n_zero=f - nn, n_nonempty=nn, z=(nn - (f - nn)) / f)

    @property
    def f(self) -> int:
        return int(len(self.bits))

    def same_as(self, other: "FrameObservation") -> bool:
        return (
            np.array_equal(self.bits, other.bits)
            and self.n_zero == other.n_zero
            and self.n_nonempty == other.n_nonempty
            and self.z == other.z
        )


@dataclass(frozen=True)
class EstimateResult:
    z_bar: float
    t_hat: Optional[float]
    rounds_used: int
    saturated: bool = False
    z_values: tuple = field(default=(), repr=False)

    @property
    def t_hat_rounded(self) -> Optional[int]:
        return None if self.t_hat is None else int(round(self.t_hat))


def _log_empty(t: float, ch: ChannelParams) -> float:
    """``log((1 - p/f)**t)``; ``-inf`` when a tag is certain to hit every slot."""
    if t == 0:
        return 0.0
    if ch.q >= 1.0:
        return -math.inf
    return t * math.log1p(-ch.q)


def _check_t(t):
    if t < 0:
        raise DomainError(f"population must be non-negative, got {t}")


def slot_probs(t: float, ch: ChannelParams) -> tuple[float, float]:
    """Probabilities ``(p0, pn)`` that a slot is empty / non-empty."""
    _check_t(t)
    p0 = math.exp(_log_empty(t, ch))
    return p0, 1.0 - p0


def g(t: float, ch: ChannelParams) -> float:
    """Expected per-frame statistic ``1 - 2 (1 - p/f)**t``."""
    _check_t(t)
    return 1.0 - 2.0 * math.exp(_log_empty(t, ch))


def g_inverse(z_bar: float, ch: ChannelParams) -> float:
    """Population ``t`` with ``g(t) == z_bar``.

    Raises Saturated for ``z_bar == 1`` (no empty slot was ever seen).
    """
    if math.isnan(z_bar) or z_bar < -1.0 or z_bar > 1.0:
        raise DomainError(f"statistic must lie in [-1, 1], got {z_bar}")
    if z_bar == 1.0:
        raise Saturated("mean statistic is 1: every slot was occupied in every round")
    if ch.q >= 1.0:
        raise DomainError("p/f == 1 makes the expected statistic constant; not invertible")
    t = math.log((1.0 - z_bar) / 2.0) / math.log1p(-ch.q)
    return max(t, 0.0)


def variance_z(t: float, ch: ChannelParams) -> float:
    """Variance of the per-frame statistic, ``(1 - (pn - p0)**2) / f``."""
    p0, pn = slot_probs(t, ch)
    mu = pn - p0
    return max(0.0, 1.0 - mu * mu) / ch.f


def z_statistic(obs: FrameObservation) -> float:
    b = np.asarray(obs.bits)
    f = int(b.size)
    nn = int(np.count_nonzero(b))
    if obs.n_nonempty != nn or obs.n_zero != f - nn:
        raise InconsistentObservation(
            f"counts (N0={obs.n_zero}, Nn={obs.n_nonempty}) disagree with a "
            f"{f}-slot sequence holding {nn} ones"
        )
    return (obs.n_nonempty - obs.n_zero) / f


def estimate(observations: Sequence[FrameObservation], ch: ChannelParams) -> EstimateResult:
    """Average the per-round statistic and invert the expectation."""
    if len(observations) == 0:
        raise EmptyInput("at least one frame observation is required")
    sizes = {obs.f for obs in observations}
    if len(sizes) > 1:
        raise MixedFrameSizes(f"observations mix frame sizes {sorted(sizes)}")
    if sizes != {ch.f}:
        raise MixedFrameSizes(f"observations have f={sizes.pop()} but channel has f={ch.f}")
    zs = tuple(z_statistic(o) for o in observations)
    return estimate_from_z(zs, ch)


def estimate_from_z(zs: Sequence[float], ch: ChannelParams) -> EstimateResult:
    """Same as :func:`estimate` for already-reduced per-round statistics."""
    if len(zs) == 0:
        raise EmptyInput("at least one round is required")
    z_bar = math.fsum(zs) / len(zs)
    # guard against fsum/len rounding just outside [-1, 1]
    z_bar = min(1.0, max(-1.0, z_bar))
    if z_bar == 1.0:
        return EstimateResult(z_bar=1.0, t_hat=None, rounds_used=len(zs), saturated=True, z_values=tuple(zs))
    return EstimateResult(
        z_bar=z_bar, t_hat=g_inverse(z_bar, ch), rounds_used=len(zs), z_values=tuple(zs)
    )
