"""Deterministic RNG derivation.

Every stochastic component draws from its own generator derived from the
experiment seed plus a stream tag, so results do not depend on scheduling
or call order between components.
"""

from __future__ import annotations

import zlib

import numpy as np


def _stream_ints(parts) -> list[int]:
    out = []
    for part in parts:
        if isinstance(part, str):
            out.append(zlib.crc32(part.encode()))
        else:
            out.append(int(part) & 0xFFFFFFFF)
    return out


def rng_for(seed: int, *stream) -> np.random.Generator:
    """Generator for (seed, stream...), stable across runs and platforms."""
    return np.random.default_rng(np.random.SeedSequence([int(seed) & 0xFFFFFFFF] + _stream_ints(stream)))
