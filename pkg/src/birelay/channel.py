"""Rayleigh fading draws and reproducible random streams.

Fading coefficients are circularly-symmetric complex Gaussian with zero
mean and unit variance, constant within one frame and independent across
frames. Channel reciprocity is assumed: the same coefficient serves the
uplink and downlink halves of a frame.

Streams are derived from a counter-based generator (Philox) keyed by a
master seed and a stream id, so any (seed, id) pair maps to a bit-exact
sequence no matter which worker draws it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "ChannelPair",
    "FrameChannels",
    "derive_stream",
    "draw_frame_channels",
    "draw_channel_matrix",
]


class ChannelPair(NamedTuple):
    """Fading coefficients of one relay: source-1 link and source-2 link."""

    h1: complex
    h2: complex


@dataclass(frozen=True)
class FrameChannels:
    """Per-relay channel pairs of a single frame, in relay order."""

    pairs: tuple[ChannelPair, ...]

    def __post_init__(self) -> None:
        if len(self.pairs) == 0:
            raise ValueError("FrameChannels requires at least one relay")

    @property
    def n_relays(self) -> int:
        return len(self.pairs)


def derive_stream(master_seed: int, stream_id) -> np.random.Generator:
    """Independent reproducible stream for (master_seed, stream_id).

    stream_id may be an integer or a tuple of integers; distinct ids give
    statistically independent streams, identical ids reproduce the same
    sequence bit for bit.
    """
    key = stream_id if isinstance(stream_id, tuple) else (int(stream_id),)
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(ss))


def draw_frame_channels(n_relays: int, stream: np.random.Generator) -> FrameChannels:
    """Draw one frame's worth of independent unit-variance Rayleigh pairs."""
    if n_relays < 1:
        raise ValueError("n_relays must be >= 1")
    h1, h2 = draw_channel_matrix(1, n_relays, stream)
    pairs = tuple(ChannelPair(complex(h1[0, k]), complex(h2[0, k])) for k in range(n_relays))
    return FrameChannels(pairs)


def draw_channel_matrix(
    n_frames: int, n_relays: int, stream: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized channel draws: two (n_frames, n_relays) complex arrays.

    Each entry is CN(0, 1): independent real and imaginary parts with
    variance one half. The h1 block is drawn before the h2 block so that
    consumers sharing a stream see a fixed layout.
    """
    if n_frames < 1 or n_relays < 1:
        raise ValueError("n_frames and n_relays must be >= 1")
    scale = 1.0 / math.sqrt(2.0)
    shape = (n_frames, n_relays)
    h1 = scale * (stream.standard_normal(shape) + 1j * stream.standard_normal(shape))
    h2 = scale * (stream.standard_normal(shape) + 1j * stream.standard_normal(shape))
    return h1, h2
