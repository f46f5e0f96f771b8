"""Estimate the diversity order of min-max relay selection from simulation.

For each relay count the SER curve is simulated over a short SNR grid
and a straight line is fitted to the top grid points on log-log axes.
The fitted slope should land near the relay count.
"""

from __future__ import annotations

import time

from birelay.montecarlo import ExperimentConfig, estimate_diversity_order, estimate_ser

# grids shrink with relay count so the deepest point stays affordable
RUNS = {
    1: dict(grid=(10.0, 15.0, 20.0, 25.0, 30.0), min_errors=300),
    2: dict(grid=(10.0, 15.0, 20.0, 25.0), min_errors=300),
    3: dict(grid=(10.0, 15.0, 20.0), min_errors=250),
}


def fit_one(n_relays: int, grid: tuple[float, ...], min_errors: int) -> tuple[float, int]:
    cfg = ExperimentConfig(
        scheme="rs-minmax",
        n_relays=n_relays,
        snr_grid_db=grid,
        min_errors=min_errors,
        max_frames=50_000_000,
        master_seed=31337,
        chunk_frames=500_000,
    )
    curve = estimate_ser(cfg)
    slope = estimate_diversity_order(curve, hi_points=3)
    frames = sum(pt.frames for pt in curve.points)
    return slope, frames


def main() -> None:
    print("scheme rs-minmax, unit powers, slope fitted on the top 3 points")
    for n_relays, spec in RUNS.items():
        t0 = time.monotonic()
        slope, frames = fit_one(n_relays, spec["grid"], spec["min_errors"])
        print(
            f"  {n_relays} relays: slope {slope:5.2f}  "
            f"({frames / 1e6:.1f}M frames, {time.monotonic() - t0:.1f} s)"
        )
    print("each relay steepens the slope; the full order needs deeper SNR to emerge")


if __name__ == "__main__":
    main()
