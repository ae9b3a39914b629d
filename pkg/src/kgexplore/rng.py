"""Deterministic seed derivation for independent random substreams.

Every sampled quantity in the package is driven by a master seed plus a
stable stream index (walk number, entry key, trial number).  Substreams are
derived, never consumed sequentially, so results do not depend on execution
order and parallel runs agree with serial ones.
"""

import hashlib
import random

_MASK64 = 0xFFFFFFFFFFFFFFFF
_GOLDEN = 0x9E3779B97F4A7C15


def mix64(seed: int, index: int) -> int:
    """SplitMix64 finalizer over (seed, index); returns a 64-bit substream seed."""
    z = (seed + (index + 1) * _GOLDEN) & _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def substream(seed: int, index: int) -> random.Random:
    """Independent PRNG for stream `index` under a master seed."""
    return random.Random(mix64(seed, index))


def keyed_seed(seed: int, *parts: str) -> int:
    """64-bit seed derived from a master seed and string key parts.

    Stable across runs and platforms (blake2b, not hash()), so per-entry
    streams survive changes in iteration order.
    """
    h = hashlib.blake2b(digest_size=8)
    h.update(str(seed).encode())
    for part in parts:
        h.update(b"\x00")
        h.update(part.encode())
    return int.from_bytes(h.digest(), "big")
