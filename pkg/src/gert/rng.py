"""Counter-based SplitMix64 streams.

Every random draw is a pure function of ``(master_seed, domain, trial, round, index)``
so any frame can be regenerated in isolation and in any order.

Algorithm (all arithmetic modulo 2**64):

    mix64(z):
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        return z ^ (z >> 31)

    stream_key(seed, domain, trial, round):
        k = mix64(seed + GOLDEN)
        k = mix64(k ^ mix64(domain + GOLDEN))
        k = mix64(k ^ mix64(trial + 2 * GOLDEN))
        k = mix64(k ^ mix64(round + 3 * GOLDEN))

    draw(key, i) = mix64(key + (i + 1) * GOLDEN)        # i-th 64-bit output

    uniform(key, i) = (draw(key, i) >> 11) * 2**-53      # in [0, 1)

with GOLDEN = 0x9E3779B97F4A7C15. ``draw`` is exactly the SplitMix64 output
sequence started from state ``key``.
"""

from __future__ import annotations

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

DOMAIN_FRAME = 1
DOMAIN_PROBE = 2

_INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, domain: int, trial: int, round_index: int) -> int:
    k = mix64(seed + GOLDEN)
    k = mix64(k ^ mix64(domain + GOLDEN))
    k = mix64(k ^ mix64(trial + 2 * GOLDEN))
    return mix64(k ^ mix64(round_index + 3 * GOLDEN))


def mix64_array(z: np.ndarray) -> np.ndarray:
    z = z.astype(np.uint64, copy=True)
    with np.errstate(over="ignore"):
        z ^= z >> np.uint64(30)
        z *= np.uint64(_M1)
        z ^= z >> np.uint64(27)
        z *= np.uint64(_M2)
        z ^= z >> np.uint64(31)
    return z


def draws(keys, count: int, start: int = 0) -> np.ndarray:
    """64-bit outputs ``start .. start+count-1`` of each stream in ``keys``.

    ``keys`` may be a scalar key or a 1-d sequence; the result has shape
    ``(len(keys), count)`` (or ``(count,)`` for a scalar).
    """
    k = np.asarray(keys, dtype=np.uint64)
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        states = k[..., None] + idx * np.uint64(GOLDEN)
    return mix64_array(states)


def uniforms(keys, count: int, start: int = 0) -> np.ndarray:
    return (draws(keys, count, start) >> np.uint64(11)).astype(np.float64) * _INV_2_53
