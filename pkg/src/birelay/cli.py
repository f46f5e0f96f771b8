"""Command-line experiment runner.

Subcommands:
  simulate      run one simulation config (YAML) and write its SER CSV
  analytic      tabulate the closed-form high-SNR curves as CSV
  sweep-lambda  tabulate SER against the source/relay power split
  reproduce     one-command presets for the headline figures (2..6)

Every run directory gets a manifest recording the config digest, seed,
schemes and output names, so a run can be identified and repeated
byte-for-byte. Plot output is a plain matplotlib script next to the
CSVs; rendering is left to the caller.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import yaml

from . import __version__
from .analysis import PowerProfile, asymptotic_ser_ap, asymptotic_ser_rs
from .montecarlo import (
    SCHEMES,
    ExperimentConfig,
    estimate_ser,
)
from .powalloc import (
    mc_sweep_lambda,
    mc_sweep_to_csv_text,
    opa_split,
    split_for_lambda,
    sweep_lambda,
)

__all__ = ["ConfigError", "RunManifest", "load_experiment_config", "run", "main"]


class ConfigError(ValueError):
    """Invalid run configuration; carries the offending field name."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field {field!r}: {message}")


_TOP_KEYS = {
    "scheme", "n_relays", "p_s", "p_r", "constellation",
    "snr_grid_db", "stopping", "master_seed", "chunk_frames",
}
_STOP_KEYS = {"min_errors", "max_frames"}


def _require(cond: bool, field: str, message: str) -> None:
    if not cond:
        raise ConfigError(field, message)


def parse_config_dict(raw: dict) -> ExperimentConfig:
    """Validate a parsed config mapping into an ExperimentConfig."""
    _require(isinstance(raw, dict), "<root>", "top level must be a mapping")
    unknown = set(raw) - _TOP_KEYS
    _require(not unknown, sorted(unknown)[0] if unknown else "", "unknown field")
    for key in ("scheme", "n_relays", "snr_grid_db"):
        _require(key in raw, key, "required field missing")
    _require(isinstance(raw["scheme"], str) and raw["scheme"] in SCHEMES,
             "scheme", f"must be one of {list(SCHEMES)}")
    _require(isinstance(raw["n_relays"], int) and raw["n_relays"] >= 1,
             "n_relays", "must be an integer >= 1")
    grid = raw["snr_grid_db"]
    _require(isinstance(grid, (list, tuple)) and len(grid) > 0,
             "snr_grid_db", "must be a non-empty list of dB values")
    _require(all(isinstance(x, (int, float)) for x in grid),
             "snr_grid_db", "entries must be numbers")

    stopping = raw.get("stopping", {})
    _require(isinstance(stopping, dict), "stopping", "must be a mapping")
    unknown = set(stopping) - _STOP_KEYS
    _require(not unknown, "stopping." + (sorted(unknown)[0] if unknown else ""), "unknown field")

    kwargs = dict(
        scheme=raw["scheme"],
        n_relays=raw["n_relays"],
        snr_grid_db=tuple(float(x) for x in grid),
    )
    for key in ("p_s", "p_r"):
        if key in raw:
            _require(isinstance(raw[key], (int, float)) and raw[key] > 0,
                     key, "must be a positive number")
            kwargs[key] = float(raw[key])
    if "constellation" in raw:
        _require(isinstance(raw["constellation"], str), "constellation", "must be a string")
        kwargs["constellation"] = raw["constellation"]
    if "min_errors" in stopping:
        _require(isinstance(stopping["min_errors"], int) and stopping["min_errors"] >= 1,
                 "stopping.min_errors", "must be an integer >= 1")
        kwargs["min_errors"] = stopping["min_errors"]
    if "max_frames" in stopping:
        _require(isinstance(stopping["max_frames"], int) and stopping["max_frames"] >= 1,
                 "stopping.max_frames", "must be an integer >= 1")
        kwargs["max_frames"] = stopping["max_frames"]
    for key in ("master_seed", "chunk_frames"):
        if key in raw:
            _require(isinstance(raw[key], int), key, "must be an integer")
            kwargs[key] = raw[key]
    try:
        return ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError("<config>", str(exc)) from exc


def load_experiment_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    return parse_config_dict(raw)


def config_digest(payload: dict) -> str:
    """sha256 of the canonical (sorted-key) JSON form of a config mapping."""
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class RunManifest:
    config_digest: str
    master_seed: int
    schemes: tuple[str, ...]
    outputs: tuple[str, ...]
    wall_clock_seconds: float
    version: str
    created_utc: str

    def to_json(self) -> str:
        payload = asdict(self)
        payload["schemes"] = list(self.schemes)
        payload["outputs"] = list(self.outputs)
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def write(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())


def _write_manifest(out_dir: Path, digest: str, seed: int, schemes, outputs, t0: float) -> Path:
    manifest = RunManifest(
        config_digest=digest,
        master_seed=seed,
        schemes=tuple(schemes),
        outputs=tuple(sorted(outputs)),
        wall_clock_seconds=round(time.monotonic() - t0, 3),
        version=__version__,
        created_utc=datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
    )
    path = out_dir / "manifest.json"
    manifest.write(path)
    return path


def _cfg_payload(cfg: ExperimentConfig) -> dict:
    return {
        "scheme": cfg.scheme,
        "n_relays": cfg.n_relays,
        "p_s": cfg.p_s,
        "p_r": cfg.p_r,
        "constellation": cfg.constellation,
        "snr_grid_db": list(cfg.snr_grid_db),
        "stopping": {"min_errors": cfg.min_errors, "max_frames": cfg.max_frames},
        "master_seed": cfg.master_seed,
        "chunk_frames": cfg.chunk_frames,
    }


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    kwargs = _cfg_payload(cfg)
    stopping = kwargs.pop("stopping")
    kwargs["min_errors"] = stopping["min_errors"]
    kwargs["max_frames"] = stopping["max_frames"]
    kwargs["snr_grid_db"] = tuple(kwargs["snr_grid_db"])
    if getattr(args, "seed", None) is not None:
        kwargs["master_seed"] = args.seed
    if getattr(args, "min_errors", None) is not None:
        kwargs["min_errors"] = args.min_errors
    if getattr(args, "max_frames", None) is not None:
        kwargs["max_frames"] = args.max_frames
    return ExperimentConfig(**kwargs)


def _grid_from_spec(spec: str) -> tuple[float, ...]:
    """Parse '0:25:2.5' (start:stop:step, inclusive) or '1,2,3'."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise ConfigError("grid", "ranges are start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ConfigError("grid", "need step > 0 and stop >= start")
        count = int(round((stop - start) / step)) + 1
        return tuple(start + i * step for i in range(count))
    return tuple(float(p) for p in spec.split(","))


# ---------------------------------------------------------------- simulate

def _cmd_simulate(args) -> int:
    t0 = time.monotonic()
    cfg = load_experiment_config(args.config)
    cfg = _apply_overrides(cfg, args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    curve = estimate_ser(cfg, workers=args.threads)
    name = f"{cfg.scheme}_n{cfg.n_relays}.csv"
    curve.write_csv(out_dir / name)
    _write_manifest(out_dir, config_digest(_cfg_payload(cfg)), cfg.master_seed,
                    [cfg.scheme], [name], t0)
    print(f"wrote {name} ({len(curve.points)} points) to {out_dir}")
    return 0


# ---------------------------------------------------------------- analytic

def _analytic_csv_text(kind: str, n_relays: int, p_s: float, p_r: float,
                       c: float, grid: tuple[float, ...]) -> str:
    lines = ["snr_db,ser_asym"]
    for db in grid:
        n0 = p_s / 10.0 ** (db / 10.0)
        pp = PowerProfile(p_s=p_s, p_r=p_r, n0=n0)
        if kind == "rs":
            val = asymptotic_ser_rs(n_relays, pp, c)
        else:
            val = asymptotic_ser_ap(n_relays, pp, c)
        lines.append(f"{db:.10g},{val:.12g}")
    return "\n".join(lines) + "\n"


def _cmd_analytic(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = _grid_from_spec(args.grid_db)
    text = _analytic_csv_text(args.kind, args.n_relays, args.p_s, args.p_r, args.c, grid)
    name = f"analytic_{args.kind}_n{args.n_relays}.csv"
    (out_dir / name).write_text(text, encoding="utf-8")
    print(f"wrote {name} to {out_dir}")
    return 0


# ------------------------------------------------------------ sweep-lambda

def _cmd_sweep_lambda(args) -> int:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    grid = tuple(float(x) for x in args.grid.split(","))
    outputs = []
    t0 = time.monotonic()
    table, best = sweep_lambda(args.p, args.n_relays, args.c, args.n0, grid)
    lines = ["lambda,ser_asym"]
    for lam, ser in table:
        lines.append(f"{lam:.10g},{ser:.12g}")
    name = f"lambda_asym_n{args.n_relays}.csv"
    (out_dir / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
    outputs.append(name)
    print(f"analytic argmin lambda = {best:g}")
    if args.simulate:
        rows = mc_sweep_lambda(
            args.p, args.n_relays, args.n0, grid,
            min_errors=args.min_errors if args.min_errors is not None else 100,
            max_frames=args.max_frames if args.max_frames is not None else 2_000_000,
            master_seed=args.seed if args.seed is not None else 12345,
            chunk_frames=100_000,
            workers=args.threads,
        )
        name = f"lambda_mc_n{args.n_relays}.csv"
        (out_dir / name).write_text(mc_sweep_to_csv_text(rows, args.n0), encoding="utf-8")
        outputs.append(name)
        best_mc = min(rows, key=lambda r: r[1].ser_avg)[0]
        print(f"simulated argmin lambda = {best_mc:g}")
    digest = config_digest({
        "command": "sweep-lambda", "p": args.p, "n_relays": args.n_relays,
        "c": args.c, "n0": args.n0, "grid": list(grid), "simulate": bool(args.simulate),
    })
    _write_manifest(out_dir, digest, args.seed if args.seed is not None else 12345,
                    ["rs-minmax"] if args.simulate else [], outputs, t0)
    return 0


# --------------------------------------------------------------- reproduce

_REPRO_MIN_ERRORS = 100
_REPRO_MAX_FRAMES = 1_000_000
_REPRO_CHUNK = 100_000

_PLOT_PREAMBLE = '''\
"""Plot the CSVs in this directory. Requires matplotlib."""
import csv
import pathlib

import matplotlib.pyplot as plt

HERE = pathlib.Path(__file__).parent


def read_curve(name):
    xs, ys = [], []
    with open(HERE / name) as fh:
        for row in csv.DictReader(fh):
            if int(row.get("censored_flag", "0")):
                continue
            if float(row["ser_avg"]) <= 0:
                continue
            xs.append(float(row["snr_db"]))
            ys.append(float(row["ser_avg"]))
    return xs, ys


def read_analytic(name):
    xs, ys = [], []
    with open(HERE / name) as fh:
        for row in csv.DictReader(fh):
            xs.append(float(row["snr_db"]))
            ys.append(float(row["ser_asym"]))
    return xs, ys
'''


def _plot_script(figure: int, curve_specs, analytic_specs, xlabel: str,
                 shifts=None) -> str:
    lines = [_PLOT_PREAMBLE, "", "plt.figure()"]
    shifts = shifts or {}
    for name, label in curve_specs:
        shift = shifts.get(name, 0.0)
        lines.append(f'xs, ys = read_curve("{name}")')
        if shift:
            lines.append(f"xs = [x + {shift:.6g} for x in xs]")
        lines.append(f'plt.semilogy(xs, ys, marker="o", label="{label}")')
    for name, label in analytic_specs:
        lines.append(f'xs, ys = read_analytic("{name}")')
        lines.append(f'plt.semilogy(xs, ys, linestyle="--", label="{label}")')
    lines += [
        f'plt.xlabel("{xlabel}")',
        'plt.ylabel("average SER")',
        "plt.grid(True, which='both', alpha=0.3)",
        "plt.legend()",
        f'plt.savefig(HERE / "figure{figure}.png", dpi=150)',
        f'print("wrote", HERE / "figure{figure}.png")',
    ]
    return "\n".join(lines) + "\n"


def _lambda_plot_script(names_labels) -> str:
    lines = [_PLOT_PREAMBLE.replace('row["snr_db"]', 'row["lambda"]'), "", "plt.figure()"]
    for name, label in names_labels:
        lines.append(f'xs, ys = read_curve("{name}")')
        lines.append(f'plt.semilogy(xs, ys, marker="o", label="{label}")')
    lines += [
        'plt.xlabel("source/relay power ratio")',
        'plt.ylabel("average SER")',
        "plt.grid(True, which='both', alpha=0.3)",
        "plt.legend()",
        'plt.savefig(HERE / "figure6.png", dpi=150)',
        'print("wrote", HERE / "figure6.png")',
    ]
    return "\n".join(lines) + "\n"


def _repro_config(scheme: str, n_relays: int, grid, p_s: float, p_r: float,
                  args) -> ExperimentConfig:
    return ExperimentConfig(
        scheme=scheme,
        n_relays=n_relays,
        snr_grid_db=tuple(grid),
        p_s=p_s,
        p_r=p_r,
        min_errors=args.min_errors if args.min_errors is not None else _REPRO_MIN_ERRORS,
        max_frames=args.max_frames if args.max_frames is not None else _REPRO_MAX_FRAMES,
        master_seed=args.seed if args.seed is not None else 12345,
        chunk_frames=_REPRO_CHUNK,
    )


def _run_curves(configs, out_dir: Path, workers: int):
    outputs = []
    for name, cfg in configs:
        curve = estimate_ser(cfg, workers=workers)
        curve.write_csv(out_dir / name)
        outputs.append(name)
        print(f"wrote {name}")
    return outputs


def _cmd_reproduce(args) -> int:
    t0 = time.monotonic()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fig = args.figure
    grid_0_25 = _grid_from_spec("0:25:2.5")
    outputs: list[str] = []
    schemes: list[str] = []

    if fig == 2:
        configs = []
        for n in (2, 4):
            for scheme in ("rs-optimal", "rs-minmax"):
                configs.append((f"{scheme}_n{n}.csv",
                                _repro_config(scheme, n, grid_0_25, 1.0, 1.0, args)))
        outputs += _run_curves(configs, out_dir, args.threads)
        schemes = ["rs-optimal", "rs-minmax"]
        specs = [(name, name[:-4].replace("_", " ")) for name, _ in configs]
        script = _plot_script(2, specs, [], "source power over noise, dB")
    elif fig == 3:
        configs = []
        for n in (2, 3, 4):
            configs.append((f"rs-minmax_n{n}.csv",
                            _repro_config("rs-minmax", n, grid_0_25, 1.0, 1.0, args)))
            configs.append((f"apaf_n{n}.csv",
                            _repro_config("apaf", n, grid_0_25, 1.0, 1.0, args)))
        outputs += _run_curves(configs, out_dir, args.threads)
        schemes = ["rs-minmax", "apaf"]
        specs = [(name, name[:-4].replace("_", " ")) for name, _ in configs]
        script = _plot_script(3, specs, [], "source power over noise, dB")
    elif fig == 4:
        grid = _grid_from_spec("10:40:5")
        configs = [(f"rs-minmax_n{n}.csv",
                    _repro_config("rs-minmax", n, grid, 1.0, 1.0, args))
                   for n in (1, 2, 3, 4)]
        outputs += _run_curves(configs, out_dir, args.threads)
        schemes = ["rs-minmax"]
        analytic = []
        for n in (1, 2, 3, 4):
            name = f"analytic_rs_n{n}.csv"
            (out_dir / name).write_text(
                _analytic_csv_text("rs", n, 1.0, 1.0, 2.0, grid), encoding="utf-8")
            outputs.append(name)
            analytic.append((name, f"high-SNR slope law, {n} relays"))
        specs = [(name, name[:-4].replace("_", " ")) for name, _ in configs]
        script = _plot_script(4, specs, analytic, "source power over noise, dB")
    elif fig == 5:
        p_total = 3.0
        epa = split_for_lambda(p_total, 1.0)
        opa = opa_split(p_total)
        configs = []
        shifts = {}
        for n in (1, 2, 3, 4):
            for tag, split in (("epa", epa), ("opa", opa)):
                # common x-axis is total power over noise; each arm's own
                # snr axis is offset by 10*log10(p_total / p_s)
                offset = 10.0 * math.log10(p_total / split.p_s)
                grid = tuple(x - offset for x in grid_0_25)
                name = f"{tag}_n{n}.csv"
                configs.append((name, _repro_config(
                    "rs-minmax", n, grid, split.p_s, split.p_r, args)))
                shifts[name] = offset
        outputs += _run_curves(configs, out_dir, args.threads)
        schemes = ["rs-minmax"]
        specs = [(name, name[:-4].replace("_", " ")) for name, _ in configs]
        script = _plot_script(5, specs, [], "total power over noise, dB", shifts=shifts)
    else:  # fig == 6
        grid = (0.25, 0.4, 0.5, 0.65, 1.0)
        names_labels = []
        for n0 in (0.02, 0.01, 0.005):
            rows = mc_sweep_lambda(
                3.0, 2, n0, grid,
                min_errors=args.min_errors if args.min_errors is not None else _REPRO_MIN_ERRORS,
                max_frames=args.max_frames if args.max_frames is not None else _REPRO_MAX_FRAMES,
                master_seed=args.seed if args.seed is not None else 12345,
                chunk_frames=_REPRO_CHUNK,
                workers=args.threads,
            )
            name = f"lambda_sweep_n0_{n0:g}.csv"
            (out_dir / name).write_text(mc_sweep_to_csv_text(rows, n0), encoding="utf-8")
            outputs.append(name)
            names_labels.append((name, f"noise variance {n0:g}"))
            print(f"wrote {name}")
        schemes = ["rs-minmax"]
        script = _lambda_plot_script(names_labels)

    script_name = f"plot_fig{fig}.py"
    (out_dir / script_name).write_text(script, encoding="utf-8")
    outputs.append(script_name)
    digest = config_digest({
        "command": "reproduce", "figure": fig,
        "seed": args.seed if args.seed is not None else 12345,
        "min_errors": args.min_errors if args.min_errors is not None else _REPRO_MIN_ERRORS,
        "max_frames": args.max_frames if args.max_frames is not None else _REPRO_MAX_FRAMES,
    })
    _write_manifest(out_dir, digest, args.seed if args.seed is not None else 12345,
                    schemes, outputs, t0)
    print(f"figure {fig} artifacts in {out_dir}")
    return 0


# ------------------------------------------------------------------ parser

def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="master RNG seed")
    p.add_argument("--threads", type=int, default=1, help="worker processes")
    p.add_argument("--out-dir", default="runs", help="output directory")
    p.add_argument("--min-errors", type=int, default=None,
                   help="per-point stopping target for the worse source")
    p.add_argument("--max-frames", type=int, default=None,
                   help="per-point frame cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="birelay",
        description="Bi-directional relay network SER simulator and analyzer",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run a YAML experiment config")
    p.add_argument("config", help="path to YAML config")
    _add_common(p)
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analytic", help="tabulate closed-form SER curves")
    p.add_argument("--kind", choices=("rs", "ap"), default="rs")
    p.add_argument("--n-relays", type=int, default=2)
    p.add_argument("--p-s", type=float, default=1.0)
    p.add_argument("--p-r", type=float, default=1.0)
    p.add_argument("--c", type=float, default=2.0, help="modulation constant")
    p.add_argument("--grid-db", default="0:25:2.5",
                   help="dB grid, 'start:stop:step' or comma list")
    _add_common(p)
    p.set_defaults(func=_cmd_analytic)

    p = sub.add_parser("sweep-lambda", help="SER vs source/relay power split")
    p.add_argument("--p", type=float, default=3.0, help="total power budget")
    p.add_argument("--n-relays", type=int, default=2)
    p.add_argument("--n0", type=float, default=0.01, help="noise variance")
    p.add_argument("--c", type=float, default=2.0)
    p.add_argument("--grid", default="0.25,0.4,0.5,0.65,1.0", help="comma list of ratios")
    p.add_argument("--simulate", action="store_true", help="also run the Monte Carlo sweep")
    _add_common(p)
    p.set_defaults(func=_cmd_sweep_lambda)

    p = sub.add_parser("reproduce", help="rebuild a headline figure's artifacts")
    p.add_argument("--figure", type=int, choices=(2, 3, 4, 5, 6), required=True)
    _add_common(p)
    p.set_defaults(func=_cmd_reproduce)

    return parser


def run(argv=None) -> int:
    """CLI entry point; argv may also be a single config path (simulate)."""
    if isinstance(argv, (str, Path)):
        argv = ["simulate", str(argv)]
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
