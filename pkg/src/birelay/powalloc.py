"""Power allocation across the two sources and the selected relay.

The network spends p = 2*p_s + p_r per two-symbol exchange. With the
split ratio lam = p_s / p_r the high-SNR error coefficient scales like
((1 + 2*lam)**2 / lam)**n, minimized at lam = 1/2: a quarter of the
budget to each source and half to the relay. The even split lam = 1
costs a factor (9/8)**n relative to that optimum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .analysis import PowerProfile, asymptotic_ser_rs
from .montecarlo import ExperimentConfig, SerPoint, estimate_ser

__all__ = [
    "PowerSplit",
    "opa_split",
    "split_for_lambda",
    "sweep_lambda",
    "optimize_lambda",
    "mc_sweep_lambda",
    "mc_sweep_to_csv_text",
    "MC_SWEEP_CSV_HEADER",
]


@dataclass(frozen=True)
class PowerSplit:
    """A feasible division of the total budget: p = 2*p_s + p_r."""

    p_s: float
    p_r: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.p_s) and self.p_s > 0):
            raise ValueError("p_s must be finite and positive")
        if not (math.isfinite(self.p_r) and self.p_r > 0):
            raise ValueError("p_r must be finite and positive")

    @property
    def total(self) -> float:
        return 2.0 * self.p_s + self.p_r

    @property
    def lam(self) -> float:
        return self.p_s / self.p_r


def split_for_lambda(p: float, lam: float) -> PowerSplit:
    """Split the budget p at source-to-relay ratio lam (= p_s/p_r)."""
    if not (math.isfinite(p) and p > 0):
        raise ValueError("total power must be finite and positive")
    if not (math.isfinite(lam) and lam > 0):
        raise ValueError("lam must be finite and positive")
    p_r = p / (1.0 + 2.0 * lam)
    return PowerSplit(p_s=lam * p_r, p_r=p_r)


def opa_split(p: float) -> PowerSplit:
    """Asymptotically optimal split of the total budget: (p/4, p/4, p/2)."""
    if not (math.isfinite(p) and p > 0):
        raise ValueError("total power must be finite and positive")
    return PowerSplit(p_s=p / 4.0, p_r=p / 2.0)


def _asym_ser_at(p: float, lam: float, n_relays: int, c: float, n0: float) -> float:
    split = split_for_lambda(p, lam)
    pp = PowerProfile(p_s=split.p_s, p_r=split.p_r, n0=n0)
    return asymptotic_ser_rs(n_relays, pp, c)


def sweep_lambda(
    p: float, n_relays: int, c: float, n0: float, grid
) -> tuple[list[tuple[float, float]], float]:
    """Closed-form SER across a grid of split ratios.

    Returns (table, best_lam) where table rows are (lam, predicted ser)
    and best_lam is the grid argmin.
    """
    grid = [float(x) for x in grid]
    if not grid:
        raise ValueError("grid must not be empty")
    table = [(lam, _asym_ser_at(p, lam, n_relays, c, n0)) for lam in grid]
    best_lam = min(table, key=lambda row: row[1])[0]
    return table, best_lam


def optimize_lambda(p: float, n_relays: int, c: float, n0: float) -> float:
    """Continuous minimizer of the predicted SER over the split ratio.

    Golden-section search on a bracket spanning the relay-starved and
    source-starved regimes. The analytical answer is exactly 1/2 and
    independent of every other argument; this exists to confirm it.
    """
    res = minimize_scalar(
        lambda lam: _asym_ser_at(p, lam, n_relays, c, n0),
        bracket=(0.01, 1.0, 10.0),
        method="golden",
        options={"xtol": 1e-10},
    )
    return float(res.x)


MC_SWEEP_CSV_HEADER = (
    "lambda,n0,frames,errors_s1,errors_s2,ser_s1,ser_s2,ser_avg,ci95,censored_flag"
)


def mc_sweep_lambda(
    p: float,
    n_relays: int,
    n0: float,
    grid,
    scheme: str = "rs-minmax",
    constellation: str = "bpsk",
    min_errors: int = 100,
    max_frames: int = 100_000_000,
    master_seed: int = 12345,
    chunk_frames: int = 200_000,
    workers: int = 1,
) -> list[tuple[float, SerPoint]]:
    """Simulated SER across split ratios at a fixed noise level.

    Each ratio becomes a one-point run whose SNR grid pins the requested
    n0 through the source power of that split.
    """
    grid = [float(x) for x in grid]
    if not grid:
        raise ValueError("grid must not be empty")
    rows = []
    for lam in grid:
        split = split_for_lambda(p, lam)
        snr_db = 10.0 * math.log10(split.p_s / n0)
        cfg = ExperimentConfig(
            scheme=scheme,
            n_relays=n_relays,
            snr_grid_db=(snr_db,),
            p_s=split.p_s,
            p_r=split.p_r,
            constellation=constellation,
            min_errors=min_errors,
            max_frames=max_frames,
            master_seed=master_seed,
            chunk_frames=chunk_frames,
        )
        curve = estimate_ser(cfg, workers=workers)
        rows.append((lam, curve.points[0]))
    return rows


def mc_sweep_to_csv_text(rows: list[tuple[float, SerPoint]], n0: float) -> str:
    lines = [MC_SWEEP_CSV_HEADER]
    for lam, pt in rows:
        lines.append(
            f"{lam:.10g},{n0:.10g},{pt.frames},{pt.errors_s1},{pt.errors_s2},"
            f"{pt.ser_s1:.12g},{pt.ser_s2:.12g},{pt.ser_avg:.12g},"
            f"{pt.ci95:.12g},{int(pt.censored)}"
        )
    return "\n".join(lines) + "\n"
