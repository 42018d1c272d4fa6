"""Reproducible noise substreams.

Each frame gets its own Philox-4x64 stream (a counter-based generator with
a published reference definition) keyed by hashing ``(seed, *labels)`` with
numpy's SeedSequence. Gaussian variates come from the Box-Muller transform
applied to 53-bit uniforms, so a stream's output depends only on its key.
"""

from __future__ import annotations

import numpy as np

_TWO_M53 = 2.0**-53


def _label_word(x) -> int:
    if isinstance(x, str):
        return int.from_bytes(x.encode("utf-8")[:8].ljust(8, b"\0"), "little")
    return int(x) & 0xFFFFFFFFFFFFFFFF


def substream(seed: int, *labels) -> np.random.Philox:
    words = [_label_word(seed)] + [_label_word(x) for x in labels]
    key = np.random.SeedSequence(words).generate_state(2, np.uint64)
    return np.random.Philox(key=key)


def uniforms(bitgen: np.random.Philox, count: int) -> tuple[np.ndarray, np.ndarray]:
    """``count`` pairs (u1 in (0, 1], u2 in [0, 1))."""
    raw = bitgen.random_raw(2 * count).reshape(count, 2) >> np.uint64(11)
    u1 = (raw[:, 0].astype(np.float64) + 1.0) * _TWO_M53
    u2 = raw[:, 1].astype(np.float64) * _TWO_M53
    return u1, u2


def gaussian(bitgen: np.random.Philox, count: int) -> np.ndarray:
    pairs = (count + 1) // 2
    u1, u2 = uniforms(bitgen, pairs)
    r = np.sqrt(-2.0 * np.log(u1))
    theta = 2.0 * np.pi * u2
    z = np.empty(2 * pairs)
    z[0::2] = r * np.cos(theta)
    z[1::2] = r * np.sin(theta)
    return z[:count]


def bits(bitgen: np.random.Philox, count: int) -> np.ndarray:
    return (bitgen.random_raw(count) >> np.uint64(63)).astype(np.uint8)
