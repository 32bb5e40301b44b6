"""Command-line harness for the kicked-top experiments.

Subcommands regenerate the standard datasets (phase portraits, entanglement
series, parameter scans, Floquet spectra, open-system runs) or verify a
previous run. Configuration is resolved as: built-in defaults, then a JSON
config file, then a named preset, then individual flags. Every run writes a
manifest.json listing each emitted file with its checksum.

Exit codes: 0 success, 2 configuration error, 3 numerical-invariant
violation.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .classical import TopParams
from .errors import ConfigError, NumericalInvariantError
from .floquet import husimi
from .harness import (
    closed_series,
    kappa_scan_parallel,
    open_series,
    phi_scan_parallel,
    portrait_dataset,
    spectrum_report,
)
from .io import fmt, fmt_int, verify_manifest, write_csv, write_manifest
from .opensystem import DecoherenceParams, gamma_from_kappa
from .presets import PRESETS
from .spin import Spin

DEFAULT_BETA = 8.2  # coherence-to-scattering figure of merit for the Cs D1 drive


@dataclass
class ExperimentConfig:
    j: float = 4.0
    kappa: float = 3.0
    p: float = math.pi / 2.0
    theta: float = 2.25
    phi: float = 2.5
    kicks: int = 600
    gamma_s: float | None = None
    beta: float | None = None
    phi_scan_points: int = 200
    kappa_scan_points: int = 140
    kappa_scan_min: float = 0.0
    kappa_scan_max: float = 7.0
    portrait_kappas: tuple[float, ...] = (1.0, 3.0)
    portrait_bands: int = 12
    portrait_phis: int = 12
    portrait_kicks: int = 150
    husimi_thetas: int = 101
    husimi_phis: int = 201
    husimi_all: bool = False
    snapshot_kick: int | None = None
    out: str = "out"
    jobs: int | None = None
    seed: int = 0  # reserved for randomized initial-condition grids


_INT_FIELDS = {
    "kicks",
    "phi_scan_points",
    "kappa_scan_points",
    "portrait_bands",
    "portrait_phis",
    "portrait_kicks",
    "husimi_thetas",
    "husimi_phis",
    "snapshot_kick",
    "jobs",
    "seed",
}
_FLOAT_FIELDS = {
    "j",
    "kappa",
    "p",
    "theta",
    "phi",
    "gamma_s",
    "beta",
    "kappa_scan_min",
    "kappa_scan_max",
}


def _coerce(name: str, value):
    if value is None:
        return None
    if name in _INT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key {name!r} must be an integer")
        if float(value) != int(value):
            raise ConfigError(f"config key {name!r} must be an integer")
        return int(value)
    if name in _FLOAT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"config key {name!r} must be a number")
        return float(value)
    if name == "portrait_kappas":
        if not isinstance(value, (list, tuple)) or not value:
            raise ConfigError("portrait_kappas must be a non-empty list of numbers")
        try:
            return tuple(float(v) for v in value)
        except (TypeError, ValueError) as exc:
            raise ConfigError("portrait_kappas must be a non-empty list of numbers") from exc
    if name == "husimi_all":
        if not isinstance(value, bool):
            raise ConfigError("husimi_all must be a boolean")
        return value
    if name == "out":
        if not isinstance(value, str):
            raise ConfigError("out must be a string path")
        return value
    raise ConfigError(f"unknown config key {name!r}")


def _load_config_file(path: str) -> dict:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    return data


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = ExperimentConfig()
    known = {f.name for f in dataclasses.fields(ExperimentConfig)}

    if getattr(args, "config", None):
        for key, value in _load_config_file(args.config).items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, key, _coerce(key, value))

    if getattr(args, "preset", None):
        preset = PRESETS.get(args.preset)
        if preset is None:
            raise ConfigError(
                f"unknown preset {args.preset!r}; known: {', '.join(sorted(PRESETS))}"
            )
        for key, value in preset.items():
            setattr(cfg, key, value)

    flag_map = {
        "kappa": "kappa",
        "p": "p",
        "theta": "theta",
        "phi": "phi",
        "kicks": "kicks",
        "gamma_s": "gamma_s",
        "beta": "beta",
        "out": "out",
        "jobs": "jobs",
        "points": None,  # handled per command below
        "snapshot_kick": "snapshot_kick",
        "husimi_all": "husimi_all",
    }
    for flag, field_name in flag_map.items():
        if field_name is None or not hasattr(args, flag):
            continue
        value = getattr(args, flag)
        if value is None or (flag == "husimi_all" and value is False):
            continue
        setattr(cfg, field_name, _coerce(field_name, value))

    points = getattr(args, "points", None)
    if points is not None:
        if args.command == "scan-phi":
            cfg.phi_scan_points = _coerce("phi_scan_points", points)
        elif args.command == "scan-kappa":
            cfg.kappa_scan_points = _coerce("kappa_scan_points", points)
        else:
            raise ConfigError("--points only applies to the scan commands")

    _validate(cfg, args)
    return cfg


def _validate(cfg: ExperimentConfig, args: argparse.Namespace) -> None:
    try:
        Spin(cfg.j)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if cfg.kappa < 0:
        raise ConfigError("kappa must be non-negative")
    if cfg.kicks < 1:
        raise ConfigError("kicks must be at least 1")
    if cfg.phi_scan_points < 1 or cfg.kappa_scan_points < 1:
        raise ConfigError("scan must cover at least one point")
    if cfg.kappa_scan_max < cfg.kappa_scan_min:
        raise ConfigError("kappa_scan_max must not be below kappa_scan_min")
    if cfg.portrait_bands < 1 or cfg.portrait_phis < 1 or cfg.portrait_kicks < 1:
        raise ConfigError("portrait grid and kick count must be positive")
    if cfg.husimi_thetas < 2 or cfg.husimi_phis < 2:
        raise ConfigError("husimi grid needs at least 2 points per axis")
    if cfg.gamma_s is not None and cfg.beta is not None:
        raise ConfigError("give gamma_s or beta, not both")
    if cfg.gamma_s is not None and cfg.gamma_s < 0:
        raise ConfigError("gamma_s must be non-negative")
    if cfg.beta is not None and cfg.beta <= 0:
        raise ConfigError("beta must be positive")
    if cfg.jobs is not None and cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    if cfg.snapshot_kick is not None and not (0 <= cfg.snapshot_kick <= cfg.kicks):
        raise ConfigError("snapshot_kick must lie within the run")


def _prepare_out(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")
    return out


def _jobs(cfg: ExperimentConfig) -> int:
    return cfg.jobs if cfg.jobs is not None else (os.cpu_count() or 1)


def _params(cfg: ExperimentConfig, kappa: float | None = None) -> TopParams:
    return TopParams(cfg.j, cfg.kappa if kappa is None else kappa, cfg.p)


def cmd_portrait(cfg: ExperimentConfig, out: Path) -> list[Path]:
    files = []
    for kappa in cfg.portrait_kappas:
        data = portrait_dataset(
            _params(cfg, kappa), cfg.portrait_bands, cfg.portrait_phis, cfg.portrait_kicks
        )
        rows = (
            (fmt_int(r[0]), fmt_int(r[1]), fmt(r[2]), fmt(r[3])) for r in data
        )
        files.append(
            write_csv(out / f"portrait_kappa{kappa:g}.csv", "ic_index,kick,theta,phi", rows)
        )
    return files


def cmd_series(cfg: ExperimentConfig, out: Path) -> list[Path]:
    s, n = closed_series(cfg.theta, cfg.phi, _params(cfg), cfg.kicks)
    rows = ((fmt_int(k), fmt(s[k]), fmt(n[k])) for k in range(s.shape[0]))
    return [write_csv(out / "series.csv", "kick,S,N", rows)]


def cmd_scan_phi(cfg: ExperimentConfig, out: Path) -> list[Path]:
    phis = np.arange(cfg.phi_scan_points) * (2.0 * np.pi / cfg.phi_scan_points)
    s_avg, n_avg, support = phi_scan_parallel(
        phis, cfg.theta, _params(cfg), cfg.kicks, jobs=_jobs(cfg)
    )
    rows = (
        (fmt(phis[i]), fmt(s_avg[i]), fmt(n_avg[i]), fmt(support[i]))
        for i in range(phis.shape[0])
    )
    return [write_csv(out / "scan_phi.csv", "phi,S_avg,N_avg,s_support", rows)]


def cmd_scan_kappa(cfg: ExperimentConfig, out: Path) -> list[Path]:
    kappas = np.linspace(cfg.kappa_scan_min, cfg.kappa_scan_max, cfg.kappa_scan_points)
    s_avg, n_avg = kappa_scan_parallel(
        kappas, cfg.theta, cfg.phi, cfg.p, cfg.j, cfg.kicks, jobs=_jobs(cfg)
    )
    rows = (
        (fmt(kappas[i]), fmt(s_avg[i]), fmt(n_avg[i])) for i in range(kappas.shape[0])
    )
    return [write_csv(out / "scan_kappa.csv", "kappa,S_avg,N_avg", rows)]


def _write_husimi(path: Path, grid) -> Path:
    def rows():
        for i, theta in enumerate(grid.thetas):
            for k, phi in enumerate(grid.phis):
                yield (fmt(theta), fmt(phi), fmt(grid.values[i, k]))

    return write_csv(path, "theta,phi,p", rows())


def cmd_spectrum(cfg: ExperimentConfig, out: Path) -> list[Path]:
    spec, f = spectrum_report(cfg.theta, cfg.phi, _params(cfg))
    rows = ((fmt_int(n), fmt(spec.omegas[n]), fmt(f[n])) for n in range(spec.dim))
    files = [write_csv(out / "spectrum.csv", "n,omega,f", rows)]
    targets = range(spec.dim) if cfg.husimi_all else [int(np.argmax(f))]
    for n in targets:
        grid = husimi(spec.vectors[:, n], cfg.husimi_thetas, cfg.husimi_phis)
        files.append(_write_husimi(out / f"husimi_n{n}.csv", grid))
    return files


def cmd_open(cfg: ExperimentConfig, out: Path) -> list[Path]:
    if cfg.gamma_s is not None:
        dec = DecoherenceParams(cfg.gamma_s)
    else:
        beta = cfg.beta if cfg.beta is not None else DEFAULT_BETA
        dec = DecoherenceParams(gamma_from_kappa(cfg.kappa, cfg.j, beta), beta=beta)
    s, n, pur, rhos = open_series(cfg.theta, cfg.phi, _params(cfg), dec, cfg.kicks)
    rows = (
        (fmt_int(k), fmt(s[k]), fmt(n[k]), fmt(pur[k])) for k in range(s.shape[0])
    )
    files = [write_csv(out / "open.csv", "kick,S,N,purity", rows)]
    if cfg.snapshot_kick is not None:
        grid = husimi(rhos[cfg.snapshot_kick], cfg.husimi_thetas, cfg.husimi_phis)
        files.append(_write_husimi(out / f"husimi_kick{cfg.snapshot_kick}.csv", grid))
    return files


COMMANDS = {
    "portrait": cmd_portrait,
    "series": cmd_series,
    "scan-phi": cmd_scan_phi,
    "scan-kappa": cmd_scan_kappa,
    "spectrum": cmd_spectrum,
    "open": cmd_open,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kickedtop",
        description="Kicked-top simulation harness (classical map, Floquet spectra, "
        "entanglement dynamics, photon-scattering decoherence).",
    )
    parser.add_argument("--version", action="version", version=f"kickedtop {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, scan_points: bool = False):
        sp.add_argument("--config", help="JSON config file (flat schema)")
        sp.add_argument("--preset", help=f"named preset ({', '.join(sorted(PRESETS))})")
        sp.add_argument("--out", help="output directory (default: out)")
        sp.add_argument("--jobs", type=int, help="sweep parallelism (default: all cores)")
        sp.add_argument("--kappa", type=float, help="twist strength")
        sp.add_argument("--p", type=float, help="kick angle in radians")
        sp.add_argument("--theta", type=float, help="initial-state polar angle")
        sp.add_argument("--phi", type=float, help="initial-state azimuth")
        sp.add_argument("--kicks", type=int, help="number of kick periods")
        sp.add_argument("--gamma-s", dest="gamma_s", type=float, help="photon scattering rate")
        sp.add_argument("--beta", type=float, help="coherence-to-scattering figure of merit")
        if scan_points:
            sp.add_argument("--points", type=int, help="number of sweep points")

    add_common(sub.add_parser("portrait", help="classical stroboscopic phase portraits"))
    add_common(sub.add_parser("series", help="closed-system S and N per kick"))
    add_common(sub.add_parser("scan-phi", help="600-kick averages along a theta line"), True)
    add_common(sub.add_parser("scan-kappa", help="600-kick averages versus kappa"), True)
    sp = sub.add_parser("spectrum", help="Floquet eigenphases, overlaps, Husimi grids")
    add_common(sp)
    sp.add_argument(
        "--husimi-all",
        dest="husimi_all",
        action="store_true",
        help="emit a Husimi grid for every eigenstate, not just the dominant one",
    )
    sp = sub.add_parser("open", help="open-system S, N, purity per kick")
    add_common(sp)
    sp.add_argument(
        "--snapshot-kick",
        dest="snapshot_kick",
        type=int,
        help="also emit the Husimi grid of the state after this kick",
    )
    sp = sub.add_parser("verify", help="re-check the checksums in a run manifest")
    sp.add_argument("--out", required=True, help="directory holding manifest.json")
    return parser


def run_verify(args: argparse.Namespace) -> int:
    problems = verify_manifest(Path(args.out))
    if problems:
        for line in problems:
            print(f"verify: {line}", file=sys.stderr)
        return 3
    print(f"manifest verified: all files match in {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return run_verify(args)
        cfg = resolve_config(args)
        out = _prepare_out(cfg)
        files = COMMANDS[args.command](cfg, out)
        write_manifest(out, args.command, dataclasses.asdict(cfg), files, __version__)
        print(f"wrote {len(files)} data file(s) and manifest.json to {out}")
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        # parameter validation raised inside the library surfaces as a config error
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalInvariantError as exc:
        print(f"numerical invariant violated: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
