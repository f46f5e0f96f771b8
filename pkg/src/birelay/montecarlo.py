"""Frame-level Monte Carlo engine for SER curves.

A frame is one symbol per source over one independent channel draw. Each
SNR point is processed in fixed-size chunks; chunk j of point i draws
from the stream keyed by (master_seed, (i, j)), and a point's result is
the smallest chunk prefix that reaches the error target or the frame
cap. Worker processes only ever compute whole chunks, so the emitted
numbers are byte-identical for any worker count.

The random layout inside a chunk is fixed and scheme-independent:
channel blocks, relay-noise block, two destination-noise blocks, then
symbol indices. Runs that share a master seed therefore share their
channel realizations across schemes, which tightens scheme-to-scheme
ratio estimates considerably.

The SNR axis is source power over noise in dB; the noise variance of a
point is recovered as n0 = p_s / 10**(db/10).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from io import StringIO

import numpy as np

from .analysis import PowerProfile
from .channel import FrameChannels, derive_stream, draw_channel_matrix
from .phy import Constellation, ml_detect, ml_detect_many, modulate
from .selection import minmax_indices, optimal_indices, select_minmax, select_optimal
from .twoway import effective_snr_exact, forward_and_cancel, relay_observe

__all__ = [
    "SCHEMES",
    "ExperimentConfig",
    "SerPoint",
    "SerCurve",
    "power_profile_at",
    "run_frame_rs",
    "estimate_ser",
    "estimate_diversity_order",
]

SCHEMES = ("rs-optimal", "rs-minmax", "apaf")

CSV_HEADER = "snr_db,frames,errors_s1,errors_s2,ser_s1,ser_s2,ser_avg,ci95,censored_flag"


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation run: scheme, topology, powers, SNR grid, stopping rule.

    min_errors is the per-point target for the worse of the two sources;
    max_frames caps a point exactly (the final chunk is truncated when
    needed) and the point is marked censored when the target was not met.
    """

    scheme: str
    n_relays: int
    snr_grid_db: tuple[float, ...]
    p_s: float = 1.0
    p_r: float = 1.0
    constellation: str = "bpsk"
    min_errors: int = 100
    max_frames: int = 100_000_000
    master_seed: int = 12345
    chunk_frames: int = 200_000

    def __post_init__(self) -> None:
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.n_relays < 1:
            raise ValueError("n_relays must be >= 1")
        object.__setattr__(self, "snr_grid_db", tuple(float(x) for x in self.snr_grid_db))
        Constellation.by_name(self.constellation)  # fail early on unknown names
        if self.p_s <= 0 or self.p_r <= 0:
            raise ValueError("p_s and p_r must be positive")
        if self.min_errors < 1:
            raise ValueError("min_errors must be >= 1")
        if self.max_frames < 1:
            raise ValueError("max_frames must be >= 1")
        if self.chunk_frames < 1:
            raise ValueError("chunk_frames must be >= 1")
        if any(not math.isfinite(x) for x in self.snr_grid_db):
            raise ValueError("snr_grid_db entries must be finite")


@dataclass(frozen=True)
class SerPoint:
    snr_db: float
    frames: int
    errors_s1: int
    errors_s2: int
    ser_s1: float
    ser_s2: float
    ser_avg: float
    ci95: float
    censored: bool


@dataclass(frozen=True)
class SerCurve:
    """Per-point SER estimates of one (scheme, relay count) run."""

    points: tuple[SerPoint, ...] = field(default_factory=tuple)

    def to_csv_text(self) -> str:
        buf = StringIO()
        buf.write(CSV_HEADER + "\n")
        for pt in self.points:
            buf.write(
                f"{pt.snr_db:.10g},{pt.frames},{pt.errors_s1},{pt.errors_s2},"
                f"{pt.ser_s1:.12g},{pt.ser_s2:.12g},{pt.ser_avg:.12g},"
                f"{pt.ci95:.12g},{int(pt.censored)}\n"
            )
        return buf.getvalue()

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_csv_text())


def power_profile_at(cfg: ExperimentConfig, snr_db: float) -> PowerProfile:
    """Power profile of one grid point on the source-power-over-noise axis."""
    n0 = cfg.p_s / 10.0 ** (snr_db / 10.0)
    return PowerProfile(p_s=cfg.p_s, p_r=cfg.p_r, n0=n0)


def run_frame_rs(
    cfg: ExperimentConfig, frame_channels: FrameChannels, stream: np.random.Generator, snr_db: float | None = None
) -> tuple[int, int]:
    """Single selection-scheme frame, scalar path.

    Draws one symbol per source, observes at every relay, selects one
    relay per the configured rule, completes the downlink through it and
    counts symbol errors at each source. snr_db defaults to the first
    grid point.
    """
    if cfg.scheme not in ("rs-optimal", "rs-minmax"):
        raise ValueError("run_frame_rs requires an rs-* scheme")
    db = cfg.snr_grid_db[0] if snr_db is None else snr_db
    pp = power_profile_at(cfg, db)
    cons = Constellation.by_name(cfg.constellation)

    idx = stream.integers(0, cons.size, size=2)
    s1 = modulate(int(idx[0]), cons)
    s2 = modulate(int(idx[1]), cons)

    observations = [relay_observe(s1, s2, ch, pp, stream) for ch in frame_channels.pairs]
    gammas = [effective_snr_exact(ch, pp) for ch in frame_channels.pairs]
    if cfg.scheme == "rs-minmax":
        outcome = select_minmax(gammas)
    else:
        outcome = select_optimal(gammas, cons.c)
    k = outcome.relay_index
    ch = frame_channels.pairs[k]

    y1, link = forward_and_cancel(observations[k], s1, 1, ch, pp, stream)
    y2, _ = forward_and_cancel(observations[k], s2, 2, ch, pp, stream)
    det_at_s1 = ml_detect(y1, link.alpha, cons)  # decision about s2
    det_at_s2 = ml_detect(y2, link.alpha, cons)  # decision about s1
    err_s1 = int(det_at_s1 != int(idx[1]))
    err_s2 = int(det_at_s2 != int(idx[0]))
    return err_s1, err_s2


def _chunk_errors(
    scheme: str,
    n_relays: int,
    p_s: float,
    p_r: float,
    n0: float,
    constellation: str,
    master_seed: int,
    point_index: int,
    chunk_index: int,
    n_frames: int,
) -> tuple[int, int]:
    """Errors of one chunk; pure function of its arguments (worker-safe).

    errors_s1 counts wrong decisions made at source 1 (about the partner
    symbol), matching the source-1 SNR; errors_s2 likewise at source 2.
    """
    cons = Constellation.by_name(constellation)
    rng = derive_stream(master_seed, (point_index, chunk_index))
    n = n_relays
    b = n_frames

    h1, h2 = draw_channel_matrix(b, n, rng)
    noise_scale = math.sqrt(n0 / 2.0)
    n_r = noise_scale * (rng.standard_normal((b, n)) + 1j * rng.standard_normal((b, n)))
    nd1 = noise_scale * (rng.standard_normal((b, n)) + 1j * rng.standard_normal((b, n)))
    nd2 = noise_scale * (rng.standard_normal((b, n)) + 1j * rng.standard_normal((b, n)))
    sym = rng.integers(0, cons.size, size=(b, 2))
    s1 = cons.points[sym[:, 0]]
    s2 = cons.points[sym[:, 1]]

    a1 = np.abs(h1) ** 2
    a2 = np.abs(h2) ** 2
    sq_ps = math.sqrt(p_s)
    y_r = sq_ps * h1 * s1[:, None] + sq_ps * h2 * s2[:, None] + n_r
    beta2 = 1.0 / (p_s * a1 + p_s * a2 + n0)
    beta = np.sqrt(beta2)

    if scheme == "apaf":
        q = p_r / n  # equal split of the relay budget
        alpha = math.sqrt(p_s * q) * beta * h1 * h2
        aa = np.abs(alpha) ** 2
        v1 = q * beta2 * n0 * a1 + n0
        v2 = q * beta2 * n0 * a2 + n0
        x_r = math.sqrt(q) * beta * y_r
        z1 = h1 * x_r + nd1 - math.sqrt(p_s * q) * beta * h1 * h1 * s1[:, None]
        z2 = h2 * x_r + nd2 - math.sqrt(p_s * q) * beta * h2 * h2 * s2[:, None]
        u1 = np.sum(np.conj(alpha) / v1 * z1, axis=1)
        u2 = np.sum(np.conj(alpha) / v2 * z2, axis=1)
        g1 = np.sum(aa / v1, axis=1)
        g2 = np.sum(aa / v2, axis=1)
        det_at_s1 = ml_detect_many(u1, g1.astype(complex), cons)
        det_at_s2 = ml_detect_many(u2, g2.astype(complex), cons)
    else:
        alpha2 = p_s * p_r * beta2 * a1 * a2
        v1 = p_r * beta2 * n0 * a1 + n0
        v2 = p_r * beta2 * n0 * a2 + n0
        g1 = alpha2 / v1
        g2 = alpha2 / v2
        if scheme == "rs-minmax":
            k = minmax_indices(g1, g2)
        else:
            k = optimal_indices(g1, g2, cons.c)
        rows = np.arange(b)
        h1k = h1[rows, k]
        h2k = h2[rows, k]
        bk = beta[rows, k]
        alpha = math.sqrt(p_s * p_r) * bk * h1k * h2k
        x_r = math.sqrt(p_r) * bk * y_r[rows, k]
        z1 = h1k * x_r + nd1[:, 0] - math.sqrt(p_s * p_r) * bk * h1k * h1k * s1
        z2 = h2k * x_r + nd2[:, 0] - math.sqrt(p_s * p_r) * bk * h2k * h2k * s2
        det_at_s1 = ml_detect_many(z1, alpha, cons)
        det_at_s2 = ml_detect_many(z2, alpha, cons)

    err_s1 = int(np.count_nonzero(det_at_s1 != sym[:, 1]))
    err_s2 = int(np.count_nonzero(det_at_s2 != sym[:, 0]))
    return err_s1, err_s2


def _chunk_sizes(cfg: ExperimentConfig) -> tuple[int, ...]:
    """Fixed per-point chunk schedule honoring max_frames exactly.

    Independent of worker count by construction, which is what makes the
    stopping prefix (and therefore the result) reproducible.
    """
    full, rem = divmod(cfg.max_frames, cfg.chunk_frames)
    sizes = [cfg.chunk_frames] * full
    if rem:
        sizes.append(rem)
    return tuple(sizes)


def _finish_point(cfg: ExperimentConfig, snr_db: float, frames: int, e1: int, e2: int) -> SerPoint:
    ser1 = e1 / frames
    ser2 = e2 / frames
    avg = 0.5 * (ser1 + ser2)
    # normal approximation of the binomial over the 2*frames pooled decisions
    ci = 1.96 * math.sqrt(max(avg * (1.0 - avg), 0.0) / (2.0 * frames))
    return SerPoint(
        snr_db=snr_db,
        frames=frames,
        errors_s1=e1,
        errors_s2=e2,
        ser_s1=ser1,
        ser_s2=ser2,
        ser_avg=avg,
        ci95=ci,
        censored=min(e1, e2) < cfg.min_errors,
    )


def _run_point_serial(cfg: ExperimentConfig, point_index: int, snr_db: float) -> SerPoint:
    pp = power_profile_at(cfg, snr_db)
    sizes = _chunk_sizes(cfg)
    e1 = e2 = 0
    frames = 0
    for j, size in enumerate(sizes):
        d1, d2 = _chunk_errors(
            cfg.scheme, cfg.n_relays, cfg.p_s, cfg.p_r, pp.n0,
            cfg.constellation, cfg.master_seed, point_index, j, size,
        )
        e1 += d1
        e2 += d2
        frames += size
        if min(e1, e2) >= cfg.min_errors:
            break
    return _finish_point(cfg, snr_db, frames, e1, e2)


def _run_point_parallel(
    cfg: ExperimentConfig, point_index: int, snr_db: float, pool: ProcessPoolExecutor, workers: int
) -> SerPoint:
    # Chunks are consumed strictly in index order; extra speculative chunks
    # beyond the stopping prefix are simply discarded, so the prefix (and
    # hence the result) matches the serial path exactly.
    pp = power_profile_at(cfg, snr_db)
    sizes = _chunk_sizes(cfg)
    wave = max(2 * workers, 2)
    pending: dict[int, object] = {}
    next_submit = 0
    e1 = e2 = 0
    frames = 0
    cursor = 0
    while cursor < len(sizes):
        while next_submit < len(sizes) and len(pending) < wave:
            pending[next_submit] = pool.submit(
                _chunk_errors,
                cfg.scheme, cfg.n_relays, cfg.p_s, cfg.p_r, pp.n0,
                cfg.constellation, cfg.master_seed, point_index, next_submit, sizes[next_submit],
            )
            next_submit += 1
        d1, d2 = pending.pop(cursor).result()
        e1 += d1
        e2 += d2
        frames += sizes[cursor]
        cursor += 1
        if min(e1, e2) >= cfg.min_errors:
            break
    for fut in pending.values():
        fut.cancel()
    return _finish_point(cfg, snr_db, frames, e1, e2)


def estimate_ser(cfg: ExperimentConfig, workers: int = 1) -> SerCurve:
    """Estimate the SER curve of one configuration.

    Each grid point accumulates chunks until the worse source has
    min_errors symbol errors or the frame cap is reached. Output is
    bit-identical for any worker count.
    """
    if len(cfg.snr_grid_db) == 0:
        raise ValueError("snr_grid_db must not be empty")
    points = []
    if workers <= 1:
        for i, db in enumerate(cfg.snr_grid_db):
            points.append(_run_point_serial(cfg, i, db))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for i, db in enumerate(cfg.snr_grid_db):
                points.append(_run_point_parallel(cfg, i, db, pool, workers))
    return SerCurve(points=tuple(points))


def estimate_diversity_order(curve: SerCurve, hi_points: int) -> float:
    """Least-squares slope of -log10(ser_avg) against snr_db/10.

    Fitted over the hi_points highest-SNR points that met their error
    target; the slope is the empirical diversity order.
    """
    if hi_points < 2:
        raise ValueError("hi_points must be >= 2")
    usable = [p for p in curve.points if not p.censored and p.ser_avg > 0.0]
    if len(usable) < hi_points:
        raise ValueError(
            f"curve has only {len(usable)} uncensored positive points, need {hi_points}"
        )
    usable.sort(key=lambda p: p.snr_db)
    top = usable[-hi_points:]
    x = np.array([p.snr_db / 10.0 for p in top])
    y = np.array([-math.log10(p.ser_avg) for p in top])
    slope, _ = np.polyfit(x, y, 1)
    return float(slope)
