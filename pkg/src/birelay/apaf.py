"""All-participate AF baseline.

Every relay forwards its phase-one observation on its own orthogonal
channel with power p_r / N, each source cancels its self-interference
per branch, and the N residuals are maximal-ratio combined before a
single ML decision. The MRC output SNR equals the sum of the branch
SNRs exactly, for every channel realization.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import PowerProfile
from .channel import FrameChannels
from .phy import Constellation, ml_detect
from .twoway import forward_and_cancel, relay_observe

__all__ = ["ApConfig", "ap_effective_snr", "simulate_ap_frame"]


@dataclass(frozen=True)
class ApConfig:
    """Relay count and the equal per-relay share of the relay power budget."""

    n_relays: int
    per_relay_power: float

    def __post_init__(self) -> None:
        if self.n_relays < 1:
            raise ValueError("n_relays must be >= 1")
        if self.per_relay_power <= 0:
            raise ValueError("per_relay_power must be positive")

    @property
    def total_relay_power(self) -> float:
        return self.n_relays * self.per_relay_power


def ap_effective_snr(gammas_i: Sequence[float]) -> float:
    """Combined SNR after MRC across orthogonal relay branches: the plain sum."""
    if len(gammas_i) == 0:
        raise ValueError("ap_effective_snr requires at least one branch")
    if any(g < 0 for g in gammas_i):
        raise ValueError("branch SNRs must be nonnegative")
    return float(sum(gammas_i))


def simulate_ap_frame(
    s1: complex,
    s2: complex,
    frame: FrameChannels,
    pp: PowerProfile,
    stream: np.random.Generator,
    cons: Constellation | None = None,
) -> tuple[int, int]:
    """One all-participate frame: N independent relay chains, MRC, ML.

    pp.p_r is the total relay budget; each relay transmits with p_r / N.
    Returns (index detected at source 2 for s1, index detected at source 1
    for s2).
    """
    if cons is None:
        cons = Constellation.bpsk()
    per_relay = PowerProfile(p_s=pp.p_s, p_r=pp.p_r / frame.n_relays, n0=pp.n0)

    num1 = 0.0 + 0.0j  # MRC accumulator at source 1
    num2 = 0.0 + 0.0j
    gain1 = 0.0
    gain2 = 0.0
    for ch in frame.pairs:
        obs = relay_observe(s1, s2, ch, per_relay, stream)
        y1, link = forward_and_cancel(obs, s1, 1, ch, per_relay, stream)
        y2, _ = forward_and_cancel(obs, s2, 2, ch, per_relay, stream)
        w1 = np.conj(link.alpha) / link.noise_var_1
        w2 = np.conj(link.alpha) / link.noise_var_2
        num1 += w1 * y1
        num2 += w2 * y2
        gain1 += link.gamma1
        gain2 += link.gamma2

    # Combined statistic is gain * symbol + noise of variance gain, so the
    # effective gain handed to the detector is the SNR sum itself.
    det_s2_at_s1 = ml_detect(complex(num1), gain1, cons)
    det_s1_at_s2 = ml_detect(complex(num2), gain2, cons)
    return det_s1_at_s2, det_s2_at_s1
