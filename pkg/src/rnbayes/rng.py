"""Seeded, splittable random streams.

Every stream is a PCG64 generator keyed by ``(seed, *stream_id)`` through
:class:`numpy.random.SeedSequence` spawn keys, so parallel chains or path
batches with distinct ids never share state.
"""

from __future__ import annotations

import numpy as np


def make_stream(seed: int, *stream_id: int) -> np.random.Generator:
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream_id))
    return np.random.Generator(np.random.PCG64(ss))


def as_stream(stream) -> np.random.Generator:
    """Accept a Generator, or an int seed (mapped to stream id 0)."""
    if isinstance(stream, np.random.Generator):
        return stream
    if isinstance(stream, (int, np.integer)):
        return make_stream(int(stream))
    raise TypeError(f"expected numpy Generator or int seed, got {type(stream).__name__}")
