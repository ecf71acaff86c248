"""Framed slotted Aloha under the {0,1} channel model, and the population probe.

Each of ``t`` tags joins a frame with probability ``p`` and, if it joins,
replies in exactly one slot chosen uniformly from ``f`` slots (the hash
``h(f, S, ID)``). The reader only sees whether each slot was empty.

Randomness is drawn from :mod:`gert.rng` streams keyed by
``(master_seed, trial, round)``. Tag ``i`` uses outputs ``2i`` (participation)
and ``2i + 1`` (slot) of its round's stream, so a frame never depends on the
order in which rounds are simulated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from gert import rng
from gert.errors import DomainError
from gert.estimator import ChannelParams, FrameObservation

# rounds simulated per numpy batch; bounds memory at ~ROUND_BATCH * 2t * 8 bytes
ROUND_BATCH = 256


@dataclass(frozen=True)
class SimSeed:
    master_seed: int

    def __post_init__(self):
        if not 0 <= self.master_seed <= rng.MASK64:
            raise DomainError("master_seed must be an unsigned 64-bit integer")

    def frame_key(self, trial: int, round_index: int) -> int:
        return rng.stream_key(self.master_seed, rng.DOMAIN_FRAME, trial, round_index)

    def probe_key(self, trial: int) -> int:
        return rng.stream_key(self.master_seed, rng.DOMAIN_PROBE, trial, 0)


@dataclass(frozen=True)
class ProbeConfig:
    probe_slots: int = 32
    safety_multiplier: float = 1.0
    fm_correction: float = 1.0 / 0.77351

    def __post_init__(self):
        if self.probe_slots < 8:
            raise DomainError("probe_slots must be at least 8")
        if self.safety_multiplier < 1:
            raise DomainError("safety_multiplier must be >= 1")
        if not self.fm_correction > 0:
            raise DomainError("fm_correction must be positive")


def _occupancy(t: int, ch: ChannelParams, keys: np.ndarray) -> np.ndarray:
    """Boolean ``(len(keys), f)`` array of non-empty slots."""
    rows = len(keys)
    if t == 0:
        return np.zeros((rows, ch.f), dtype=bool)
    u = rng.uniforms(keys, 2 * t).reshape(rows, t, 2)
    joins = u[:, :, 0] < ch.p
    slots = np.minimum((u[:, :, 1] * ch.f).astype(np.int64), ch.f - 1)
    flat = (np.arange(rows, dtype=np.int64)[:, None] * ch.f + slots)[joins]
    hits = np.bincount(flat, minlength=rows * ch.f)
    return (hits > 0).reshape(rows, ch.f)


def _check(t, ch):
    if t < 0 or int(t) != t:
        raise DomainError(f"population must be a non-negative integer, got {t}")


def simulate_frame(t: int, ch: ChannelParams, seed: SimSeed, trial: int, round_index: int) -> FrameObservation:
    _check(t, ch)
    occ = _occupancy(int(t), ch, np.array([seed.frame_key(trial, round_index)], dtype=np.uint64))
    return FrameObservation.from_bits(occ[0].astype(np.uint8))


def simulate_frames(
    t: int, ch: ChannelParams, seed: SimSeed, trial: int, rounds: Iterable[int]
) -> list[FrameObservation]:
    _check(t, ch)
    rounds = list(rounds)
    out: list[FrameObservation] = []
    for start in range(0, len(rounds), ROUND_BATCH):
        keys = np.array([seed.frame_key(trial, r) for r in rounds[start : start + ROUND_BATCH]], dtype=np.uint64)
        occ = _occupancy(int(t), ch, keys)
        out.extend(FrameObservation.from_bits(row.astype(np.uint8)) for row in occ)
    return out


def nonempty_counts(
    t: int, ch: ChannelParams, seed: SimSeed, trials: Sequence[int], round_index: int = 0
) -> np.ndarray:
    """``N_n`` of frame ``(trial, round_index)`` for each trial; bits are not kept.

    Bulk path for moment checks over many frames.
    """
    _check(t, ch)
    trials = list(trials)
    out = np.empty(len(trials), dtype=np.int64)
    batch = max(1, min(ROUND_BATCH, 2_000_000 // max(1, 2 * t)))
    for start in range(0, len(trials), batch):
        chunk = trials[start : start + batch]
        keys = np.array([seed.frame_key(tr, round_index) for tr in chunk], dtype=np.uint64)
        out[start : start + len(chunk)] = _occupancy(int(t), ch, keys).sum(axis=1)
    return out


def run_rounds(t: int, plan, seed: SimSeed, trial: int) -> list[FrameObservation]:
    """The ``plan.n`` frames of one estimation, rounds ``0 .. n-1``."""
    return simulate_frames(t, plan.channel, seed, trial, range(plan.n))


def probe_slot_choices(t: int, cfg: ProbeConfig, key: int) -> np.ndarray:
    """1-based probe slot of each tag: slot ``j`` with probability ``2**-j``,
    the leftover mass going to the last slot."""
    if t == 0:
        return np.zeros(0, dtype=np.int64)
    x = rng.draws(key, t)
    lowbit = x & (~x + np.uint64(1))
    tz = np.where(x == 0, 64, np.log2(np.maximum(lowbit, np.uint64(1)).astype(np.float64))).astype(np.int64)
    return np.minimum(tz + 1, cfg.probe_slots)


def probe_first_empty(t: int, cfg: ProbeConfig, seed: SimSeed, trial: int = 0) -> int:
    """Index ``R`` (1-based) of the first empty probe slot; ``probe_slots + 1`` if none."""
    _check(t, None)
    occupied = np.zeros(cfg.probe_slots + 2, dtype=bool)
    occupied[probe_slot_choices(int(t), cfg, seed.probe_key(trial))] = True
    empty = np.flatnonzero(~occupied[1 : cfg.probe_slots + 1])
    return int(empty[0]) + 1 if empty.size else cfg.probe_slots + 1


def fm_probe(t: int, cfg: Optional[ProbeConfig] = None, seed: SimSeed = SimSeed(0), trial: int = 0) -> int:
    """Rough upper bound ``t_m`` on the population from one probe frame."""
    cfg = cfg or ProbeConfig()
    big_r = probe_first_empty(t, cfg, seed, trial)
    return max(1, math.ceil(cfg.fm_correction * 2.0 ** (big_r - 1) * cfg.safety_multiplier))
