"""Constellations, AWGN, and maximum-likelihood detection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["Constellation", "modulate", "awgn", "ml_detect", "ml_detect_many"]


@dataclass(frozen=True)
class Constellation:
    """Unit-average-power symbol alphabet with its SER constant.

    points holds the complex symbols in index order, c is the constant of
    the conditional error-rate expression Q(sqrt(c * snr)), and
    bits_per_symbol is log2 of the alphabet size.
    """

    points: np.ndarray = field(repr=False)
    c: float
    bits_per_symbol: int
    name: str = ""

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=complex)
        object.__setattr__(self, "points", pts)
        if pts.ndim != 1 or pts.size < 2:
            raise ValueError("constellation needs at least two points")
        power = float(np.mean(np.abs(pts) ** 2))
        if abs(power - 1.0) > 1e-12:
            raise ValueError(f"constellation average power must be 1, got {power}")
        if self.c <= 0:
            raise ValueError("SER constant c must be positive")

    @property
    def size(self) -> int:
        return int(self.points.size)

    @staticmethod
    def bpsk() -> "Constellation":
        # bit 0 maps to +1, bit 1 to -1
        return Constellation(np.array([1.0 + 0j, -1.0 + 0j]), c=2.0, bits_per_symbol=1, name="bpsk")

    @staticmethod
    def qpsk() -> "Constellation":
        """Gray-coded unit-modulus QPSK; c = 2*sin(pi/4)**2 = 1."""
        angles = np.pi / 4.0 + np.pi / 2.0 * np.array([0, 1, 3, 2])
        return Constellation(np.exp(1j * angles), c=1.0, bits_per_symbol=2, name="qpsk")

    @staticmethod
    def by_name(name: str) -> "Constellation":
        try:
            return {"bpsk": Constellation.bpsk, "qpsk": Constellation.qpsk}[name.lower()]()
        except KeyError:
            raise ValueError(f"unknown constellation {name!r}; expected 'bpsk' or 'qpsk'") from None


def modulate(index: int, cons: Constellation) -> complex:
    """Map a symbol index to its constellation point."""
    if not 0 <= index < cons.size:
        raise ValueError(f"symbol index {index} out of range for {cons.size}-point constellation")
    return complex(cons.points[index])


def awgn(n0: float, stream: np.random.Generator, shape=None):
    """Circularly-symmetric complex Gaussian noise with total variance n0.

    Variance n0/2 per real dimension. Returns a scalar when shape is None,
    otherwise an array of the given shape.
    """
    if n0 <= 0:
        raise ValueError("n0 must be positive")
    scale = math.sqrt(n0 / 2.0)
    if shape is None:
        re, im = stream.standard_normal(2)
        return complex(scale * re, scale * im)
    return scale * (stream.standard_normal(shape) + 1j * stream.standard_normal(shape))


def ml_detect(y: complex, alpha: complex, cons: Constellation) -> int:
    """Maximum-likelihood symbol decision for y = alpha * s + noise.

    Returns the index minimizing |y - alpha*s|^2 over the alphabet; ties
    resolve to the lowest index.
    """
    if not (np.isfinite(np.real(alpha)) and np.isfinite(np.imag(alpha))):
        raise ValueError("alpha must be finite")
    d = np.abs(y - alpha * cons.points) ** 2
    return int(np.argmin(d))


def ml_detect_many(y: np.ndarray, alpha: np.ndarray, cons: Constellation) -> np.ndarray:
    """Vectorized ml_detect over matching arrays of samples and gains."""
    d = np.abs(y[..., None] - alpha[..., None] * cons.points) ** 2
    return np.argmin(d, axis=-1)
