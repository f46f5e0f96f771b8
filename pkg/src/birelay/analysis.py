"""Closed-form error-rate expressions for bi-directional AF relaying.

This module collects the analytical side of the toolkit: the Gaussian
Q-function, the density and selection CDF of the end-to-end link SNR,
high-SNR series expansions of the symbol error rate for single-relay
selection and for the all-participate baseline, and the power-allocation
gain factor. Everything here is a pure function of its arguments; the
Monte Carlo engine lives in :mod:`birelay.montecarlo`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc, k0, k1

__all__ = [
    "PowerProfile",
    "ModulationConstant",
    "q_function",
    "asymptotic_ser_rs",
    "asymptotic_ser_ap",
    "ser_ratio_rs_over_ap",
    "opa_gain",
    "exact_snr_pdf",
    "selected_snr_cdf_approx",
]

# Double factorials above this relay count overflow the regime where the
# high-SNR expansion means anything, so reject instead of extrapolating.
_MAX_RELAYS = 20


@dataclass(frozen=True)
class PowerProfile:
    """Transmit powers and noise level of one operating point.

    Parameters
    ----------
    p_s : float
        Transmit power of each source node (linear scale).
    p_r : float
        Transmit power of the relay stage (linear scale). For the
        all-participate scheme this is the total across relays.
    n0 : float
        Complex noise variance N0, identical at every node.

    Notes
    -----
    The derived quantities follow the normalized-SNR convention used
    throughout the analysis: ``psi_r = p_r / n0``,
    ``psi_s = p_s / (n0 * (1 + lam))`` with ``lam = p_s / p_r``, and
    ``psi = 2 * (1/psi_r + 1/psi_s)``. The curve axis used by the
    simulator (source power over noise) is a different quantity and is
    handled by the experiment config, not here.
    """

    p_s: float
    p_r: float
    n0: float

    def __post_init__(self) -> None:
        for name in ("p_s", "p_r", "n0"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ValueError(f"PowerProfile.{name} must be finite and > 0, got {v!r}")

    @property
    def p(self) -> float:
        """Total power budget 2*p_s + p_r."""
        return 2.0 * self.p_s + self.p_r

    @property
    def lam(self) -> float:
        """Source-to-relay power ratio."""
        return self.p_s / self.p_r

    @property
    def psi_r(self) -> float:
        return self.p_r / self.n0

    @property
    def psi_s(self) -> float:
        return self.p_s / (self.n0 * (1.0 + self.lam))

    @property
    def psi(self) -> float:
        return 2.0 * (1.0 / self.psi_r + 1.0 / self.psi_s)


@dataclass(frozen=True)
class ModulationConstant:
    """SER constant of a constellation (2 for BPSK, 2*sin(pi/M)^2 for M-PSK)."""

    c: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.c) and self.c > 0):
            raise ValueError(f"ModulationConstant.c must be finite and > 0, got {self.c!r}")


def _c_value(c: float | ModulationConstant) -> float:
    return c.c if isinstance(c, ModulationConstant) else float(c)


def q_function(x):
    """Gaussian tail probability Q(x) = P(X > x) for standard normal X.

    Evaluated through the complementary error function,
    Q(x) = erfc(x / sqrt(2)) / 2. Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("q_function requires finite input")
    out = 0.5 * erfc(arr / math.sqrt(2.0))
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def _double_factorial(n: int) -> int:
    """(2k-1)!! style product over odd integers down from n; exact integer."""
    result = 1
    while n > 1:
        result *= n
        n -= 2
    return result


def _check_n_relays(n_relays: int) -> int:
    n = int(n_relays)
    if n != n_relays or n < 1:
        raise ValueError(f"n_relays must be a positive integer, got {n_relays!r}")
    if n > _MAX_RELAYS:
        raise ValueError(f"n_relays above {_MAX_RELAYS} is outside the supported range")
    return n


def asymptotic_ser_rs(n_relays: int, pp: PowerProfile, c: float | ModulationConstant):
    """High-SNR symbol error rate of single-relay selection with N relays.

    Returns ``((2N-1)!! / 2) * (psi / c)**N``, the leading term of the
    error-rate expansion under selection of the best of N relays. The
    derivation treats the two per-relay link SNRs as independent, which
    overstates the constant for the physical channel; see
    :func:`birelay.montecarlo.estimate_ser` for the simulated truth.
    """
    n = _check_n_relays(n_relays)
    cv = _c_value(c)
    return _double_factorial(2 * n - 1) / 2.0 * (pp.psi / cv) ** n


def asymptotic_ser_ap(n_relays: int, pp: PowerProfile, c: float | ModulationConstant):
    """High-SNR symbol error rate of the all-participate baseline.

    Returns ``((2N-1)!! / (2 * N! * c**N)) * (N/psi_r + 1/psi_s)**N`` where
    the relay power ``pp.p_r`` is split equally across the N relays.
    """
    n = _check_n_relays(n_relays)
    cv = _c_value(c)
    coeff = _double_factorial(2 * n - 1) / (2.0 * math.factorial(n) * cv**n)
    return coeff * (n / pp.psi_r + 1.0 / pp.psi_s) ** n


def ser_ratio_rs_over_ap(n_relays: int, lam: float) -> float:
    """Closed-form high-SNR ratio of selection SER to all-participate SER.

    Returns ``N! * ((1 + 2*lam) / (1 + 2*N*lam))**N``; below 1 for every
    N > 1 and lam > 0, equal to 1 at N = 1.
    """
    n = _check_n_relays(n_relays)
    if not (math.isfinite(lam) and lam > 0):
        raise ValueError(f"lam must be finite and > 0, got {lam!r}")
    return math.factorial(n) * ((1.0 + 2.0 * lam) / (1.0 + 2.0 * n * lam)) ** n


def opa_gain(n_relays: int) -> float:
    """SER improvement factor (8/9)**N of the optimal power split over the equal one."""
    n = int(n_relays)
    if n != n_relays or n < 0:
        raise ValueError(f"n_relays must be a nonnegative integer, got {n_relays!r}")
    return (8.0 / 9.0) ** n


def exact_snr_pdf(x, pp: PowerProfile):
    """Density of the harmonic-form end-to-end SNR of one two-hop link.

    For ``a = sqrt(psi_r * psi_s)`` and ``r = 1/psi_r + 1/psi_s`` this is

        f(x) = (2x * exp(-x*r) / (psi_r*psi_s))
               * ((psi_r+psi_s)/a * K1(2x/a) + 2*K0(2x/a))

    with K0, K1 the modified Bessel functions of the second kind. The
    value at x = 0 is returned as 0.0 (the 2x prefactor wins in the
    evaluation order used here); the one-sided limit of the expression
    as x -> 0+ is psi/2 = 1/psi_r + 1/psi_s, which is what the
    exponential high-SNR approximation of this density uses at the
    origin. Accepts scalars or arrays; negative x is a domain error.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("exact_snr_pdf requires x >= 0")
    psi_r, psi_s = pp.psi_r, pp.psi_s
    a = math.sqrt(psi_r * psi_s)
    rate = 1.0 / psi_r + 1.0 / psi_s
    z = 2.0 * arr / a
    with np.errstate(invalid="ignore"):
        # k1(0) is inf; the x prefactor is 0 there, so patch after the fact.
        val = (2.0 * arr * np.exp(-arr * rate) / (psi_r * psi_s)) * (
            (psi_r + psi_s) / a * k1(z) + 2.0 * k0(z)
        )
    val = np.where(arr == 0.0, 0.0, val)
    return float(val) if np.isscalar(x) or arr.ndim == 0 else val


def selected_snr_cdf_approx(x, psi: float, n_relays: int, asymptotic: bool = False):
    """CDF of the selected (best min-link) SNR in the exponential approximation.

    Default form is ``(1 - exp(-psi*x))**N``, a proper CDF. With
    ``asymptotic=True`` the raw small-x limit ``(psi*x)**N`` is returned
    instead; it exceeds 1 for large x and exists only to feed the
    high-SNR SER derivation checks.
    """
    n = _check_n_relays(n_relays)
    if not (math.isfinite(psi) and psi > 0):
        raise ValueError(f"psi must be finite and > 0, got {psi!r}")
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("selected_snr_cdf_approx requires x >= 0")
    if asymptotic:
        out = (psi * arr) ** n
    else:
        out = (-np.expm1(-psi * arr)) ** n
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out
