"""Relay selection rules.

Two criteria are supported. The optimal rule picks the relay minimizing
the sum of the two sources' instantaneous error probabilities. The
min-max rule picks the relay whose worse source fares best; because the
conditional error probability is strictly decreasing in SNR, minimizing
the maximum error probability is the same as maximizing the minimum SNR,
and the SNR form is what gets evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analysis import ModulationConstant, q_function

__all__ = ["SelectionOutcome", "select_optimal", "select_minmax", "minmax_indices", "optimal_indices"]


@dataclass(frozen=True)
class SelectionOutcome:
    """Result of one selection: chosen relay, the SNR table, and the score.

    criterion_value is the minimized sum of conditional error rates for
    the optimal rule and the achieved min-SNR for the min-max rule.
    """

    relay_index: int
    gammas: tuple[tuple[float, float], ...]
    criterion_value: float


def _as_table(gammas: Sequence[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    table = tuple((float(g1), float(g2)) for g1, g2 in gammas)
    if not table:
        raise ValueError("selection requires at least one relay")
    return table


def select_optimal(
    gammas: Sequence[tuple[float, float]], c: float | ModulationConstant = 2.0
) -> SelectionOutcome:
    """Pick the relay with the smallest sum of per-source error probabilities."""
    table = _as_table(gammas)
    cv = c.c if isinstance(c, ModulationConstant) else float(c)
    scores = [
        q_function(math.sqrt(cv * g1)) + q_function(math.sqrt(cv * g2)) for g1, g2 in table
    ]
    best = int(np.argmin(scores))  # argmin takes the first minimum, ties go low
    return SelectionOutcome(relay_index=best, gammas=table, criterion_value=float(scores[best]))


def select_minmax(gammas: Sequence[tuple[float, float]]) -> SelectionOutcome:
    """Pick the relay whose smaller per-source SNR is largest."""
    table = _as_table(gammas)
    mins = [min(g1, g2) for g1, g2 in table]
    best = int(np.argmax(mins))
    return SelectionOutcome(relay_index=best, gammas=table, criterion_value=float(mins[best]))


def minmax_indices(g1: np.ndarray, g2: np.ndarray) -> np.ndarray:
    """Vectorized min-max selection over trailing relay axis."""
    return np.argmax(np.minimum(g1, g2), axis=-1)


def optimal_indices(g1: np.ndarray, g2: np.ndarray, c: float) -> np.ndarray:
    """Vectorized optimal selection over trailing relay axis."""
    score = q_function(np.sqrt(c * g1)) + q_function(np.sqrt(c * g2))
    return np.argmin(score, axis=-1)
