"""Two-phase bi-directional amplify-and-forward protocol.

Phase one: both sources transmit simultaneously and each relay observes
the superposition. Phase two: a relay scales its observation to unit
average transmit power and broadcasts it; each source removes its own
contribution (it knows its symbol and, with reciprocity, all gains) and
detects the partner's symbol from the residual.

With channels h1, h2, source power p_s, relay power p_r and noise
variance n0, the residual seen at source i is

    y_i = alpha * s_other + w_i,
    alpha = sqrt(p_s * p_r) * beta * h1 * h2,
    Var(w_i) = p_r * beta**2 * n0 * |h_i|**2 + n0,
    beta = (p_s*|h1|**2 + p_s*|h2|**2 + n0) ** -0.5,

and the exact per-source SNR is |alpha|**2 / Var(w_i).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import PowerProfile
from .channel import ChannelPair
from .phy import awgn

__all__ = [
    "RelayObservation",
    "EndToEndLink",
    "amplification_factor",
    "relay_observe",
    "forward_and_cancel",
    "effective_snr_exact",
    "effective_snr_approx",
]


@dataclass(frozen=True)
class RelayObservation:
    """Relay-side state after phase one: received sample and scale factor."""

    y_r: complex
    beta: float


@dataclass(frozen=True)
class EndToEndLink:
    """Gains, noise variances and SNRs of one relayed two-hop link."""

    alpha: complex
    noise_var_1: float
    noise_var_2: float
    gamma1: float
    gamma2: float


def amplification_factor(ch: ChannelPair, pp: PowerProfile) -> float:
    """Scale making the relay's average transmit power exactly one."""
    g = pp.p_s * (abs(ch.h1) ** 2 + abs(ch.h2) ** 2) + pp.n0
    return 1.0 / math.sqrt(g)


def relay_observe(
    s1: complex, s2: complex, ch: ChannelPair, pp: PowerProfile, stream: np.random.Generator
) -> RelayObservation:
    """Phase one at a single relay: superimposed uplink plus noise."""
    n_r = awgn(pp.n0, stream)
    sq_ps = math.sqrt(pp.p_s)
    y_r = sq_ps * ch.h1 * s1 + sq_ps * ch.h2 * s2 + n_r
    return RelayObservation(y_r=y_r, beta=amplification_factor(ch, pp))


def _link(ch: ChannelPair, pp: PowerProfile, beta: float) -> EndToEndLink:
    alpha = math.sqrt(pp.p_s * pp.p_r) * beta * ch.h1 * ch.h2
    a2 = abs(alpha) ** 2
    v1 = pp.p_r * beta**2 * pp.n0 * abs(ch.h1) ** 2 + pp.n0
    v2 = pp.p_r * beta**2 * pp.n0 * abs(ch.h2) ** 2 + pp.n0
    return EndToEndLink(alpha=alpha, noise_var_1=v1, noise_var_2=v2, gamma1=a2 / v1, gamma2=a2 / v2)


def forward_and_cancel(
    obs: RelayObservation,
    own_symbol: complex,
    source_id: int,
    ch: ChannelPair,
    pp: PowerProfile,
    stream: np.random.Generator,
) -> tuple[complex, EndToEndLink]:
    """Phase two as seen by one source: broadcast, then self-interference removal.

    own_symbol must be the symbol that source_id transmitted in phase one.
    The self-interference term carries the source's own channel squared,
    sqrt(p_s*p_r) * beta * h_i**2 * own_symbol, not the cross gain alpha.
    Returns the residual y = alpha * s_other + w_i together with the link
    quantities.
    """
    if source_id not in (1, 2):
        raise ValueError("source_id must be 1 or 2")
    h_i = ch.h1 if source_id == 1 else ch.h2
    x_r = math.sqrt(pp.p_r) * obs.beta * obs.y_r
    received = h_i * x_r + awgn(pp.n0, stream)
    self_term = math.sqrt(pp.p_s * pp.p_r) * obs.beta * h_i * h_i * own_symbol
    link = _link(ch, pp, obs.beta)
    return received - self_term, link


def effective_snr_exact(ch: ChannelPair, pp: PowerProfile) -> tuple[float, float]:
    """Exact per-source SNRs of one relayed link, from first principles."""
    beta = amplification_factor(ch, pp)
    link = _link(ch, pp, beta)
    return link.gamma1, link.gamma2


def effective_snr_approx(ch: ChannelPair, pp: PowerProfile) -> tuple[float, float]:
    """Harmonic-form high-SNR approximation of the per-source SNRs.

    gamma1 = psi_r*psi_s*|h1|^2*|h2|^2 / (psi_r*|h1|^2 + psi_s*|h2|^2) and
    gamma2 with the channel roles swapped in the denominator. Never below
    the exact value, since the dropped denominator constant is positive.
    """
    a1 = abs(ch.h1) ** 2
    a2 = abs(ch.h2) ** 2
    psi_r, psi_s = pp.psi_r, pp.psi_s
    num = psi_r * psi_s * a1 * a2
    if num == 0.0:
        return 0.0, 0.0
    return num / (psi_r * a1 + psi_s * a2), num / (psi_r * a2 + psi_s * a1)
