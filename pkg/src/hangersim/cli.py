"""Batch command-line front-end.

    hangersim <experiment> [--config FILE] [--seed N] [--out DIR]
              [--threads K] [--format csv|json] [--set section.key=value ...]

Experiments (all deterministic for a fixed seed; outputs embed the resolved
configuration in their headers):

    iq-sweep        phase-plane loci of T, R and the constructive port over a
                    frequency sweep, for both qubit states
    distance-sweep  pointer separation vs probe frequency on T, R and T+R
    beta-curve      interference gain vs splitter phase, closed form next to
                    the end-to-end value from full responses
    calibrate-theta phase round trip on every bundled device (optionally with
                    measurement noise) plus a chain-gain fit demo
    single-shot     Monte Carlo histograms and Gaussian analysis at one
                    measurement time, T vs T+R
    error-vs-time   measurement error vs integration time, T vs T+R, analytic
                    and Monte Carlo, with their ratio
    optimal-error   optimized total error vs relaxation time for both ports

Exit codes: 0 success, 2 configuration error, 3 numeric/degenerate model
error, 4 I/O error.  ``HANGERSIM_OUT`` sets the default output directory.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from pathlib import Path as FsPath

import numpy as np

from . import __version__
from .calibration import estimate_theta_rt, fit_chain_gains, measured_ratios
from .cavity import (
    DriveTone,
    Path,
    PointerPair,
    QubitState,
    reflection,
    transmission,
)
from .config import ExperimentConfig, load_config
from .exceptions import ConfigError, HangersimError
from .interference import InterferenceSetting, combine, enhancement_factor
from .optimizer import ErrorModelParams, optimal_time
from .readout import (
    ChainNoise,
    ShotConfig,
    analyze,
    histogram_batches,
    pointer_means,
    simulate_shots,
)

ENV_OUT_DIR = "HANGERSIM_OUT"

EXPERIMENTS = {}


def _experiment(name):
    def register(fn):
        EXPERIMENTS[name] = fn
        return fn

    return register


class _Outputs:
    """Table/report writers that stamp every file with the resolved config."""

    def __init__(self, cfg: ExperimentConfig, experiment: str, out_dir: FsPath):
        self.cfg = cfg
        self.experiment = experiment
        self.out_dir = out_dir
        self.written: list[FsPath] = []

    def _meta_lines(self) -> list[str]:
        lines = [
            f"hangersim {__version__} experiment={self.experiment}",
            f"seed={self.cfg.seed}",
            f"config={self.cfg.resolved_json()}",
        ]
        if self.cfg.embed_timestamp:
            lines.append(f"timestamp={time.strftime('%Y-%m-%dT%H:%M:%S%z')}")
        return lines

    def file(self, stem: str, suffix: str) -> FsPath:
        path = self.out_dir / f"{stem}.{suffix}"
        self.written.append(path)
        return path

    def table(self, stem: str, columns: list[str], rows) -> FsPath:
        """Write a numeric table as CSV (default) or structured JSON."""
        rows = [[float(v) for v in row] for row in rows]
        if self.cfg.format == "json":
            path = self.file(stem, "json")
            doc = {"meta": self._meta_lines(), "columns": columns, "rows": rows}
            path.write_text(json.dumps(doc, indent=2) + "\n")
            return path
        path = self.file(stem, "csv")
        with open(path, "w", newline="") as fh:
            for line in self._meta_lines():
                fh.write(f"# {line}\n")
            fh.write(",".join(columns) + "\n")
            for row in rows:
                fh.write(",".join(repr(v) for v in row) + "\n")
        return path

    def report(self, stem: str, doc: dict) -> FsPath:
        path = self.file(stem, "json")
        payload = {"meta": self._meta_lines(), **doc}
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path


def _frequency_grid(cfg: ExperimentConfig) -> np.ndarray:
    device = cfg.device()
    half = cfg.freq_span_kappa * device.cavity.kappa
    return np.linspace(device.cavity.omega_r - half, device.cavity.omega_r + half, cfg.freq_points)


def _responses(cfg: ExperimentConfig, state: QubitState, grid) -> tuple[np.ndarray, np.ndarray]:
    device = cfg.device()
    a_t = np.empty(len(grid), dtype=complex)
    a_r = np.empty(len(grid), dtype=complex)
    for idx, omega in enumerate(grid):
        drive = DriveTone(omega_d=float(omega))
        a_t[idx] = transmission(device.cavity, state, drive)
        a_r[idx] = reflection(device.cavity, state, drive)
    return a_t, a_r


@_experiment("iq-sweep")
def run_iq_sweep(cfg: ExperimentConfig, out: _Outputs) -> None:
    device = cfg.device()
    grid = _frequency_grid(cfg)
    setting = InterferenceSetting(device.theta_rt)
    columns = ["frequency_hz"]
    blocks = {}
    for state, tag in ((QubitState.GROUND, "g"), (QubitState.EXCITED, "e")):
        a_t, a_r = _responses(cfg, state, grid)
        a_plus = np.array([combine(t, r, setting)[0] for t, r in zip(a_t, a_r)])
        blocks[tag] = (a_t, a_r, a_plus)
    for path_tag in ("t", "r", "plus"):
        for state_tag in ("g", "e"):
            columns += [f"{path_tag}_{state_tag}_re", f"{path_tag}_{state_tag}_im"]
    rows = []
    for idx, omega in enumerate(grid):
        row = [omega / (2.0 * math.pi)]
        for path_idx in range(3):
            for state_tag in ("g", "e"):
                amp = blocks[state_tag][path_idx][idx]
                row += [amp.real, amp.imag]
        rows.append(row)
    out.table("iq_sweep", columns, rows)


@_experiment("distance-sweep")
def run_distance_sweep(cfg: ExperimentConfig, out: _Outputs) -> None:
    device = cfg.device()
    grid = _frequency_grid(cfg)
    setting = InterferenceSetting(device.theta_rt)
    t_g, r_g = _responses(cfg, QubitState.GROUND, grid)
    t_e, r_e = _responses(cfg, QubitState.EXCITED, grid)
    rows = []
    for idx, omega in enumerate(grid):
        plus_g, _ = combine(t_g[idx], r_g[idx], setting)
        plus_e, _ = combine(t_e[idx], r_e[idx], setting)
        rows.append(
            [
                omega / (2.0 * math.pi),
                abs(t_e[idx] - t_g[idx]),
                abs(r_e[idx] - r_g[idx]),
                abs(plus_e - plus_g),
            ]
        )
    out.table("distance_sweep", ["frequency_hz", "d_t", "d_r", "d_plus"], rows)


@_experiment("beta-curve")
def run_beta_curve(cfg: ExperimentConfig, out: _Outputs) -> None:
    grid = _frequency_grid(cfg)
    t_g, r_g = _responses(cfg, QubitState.GROUND, grid)
    t_e, r_e = _responses(cfg, QubitState.EXCITED, grid)
    d_t = np.abs(t_e - t_g)
    d_r = np.abs(r_e - r_g)
    thetas = np.linspace(-math.pi, math.pi, cfg.theta_points)
    rows = []
    for theta in thetas:
        setting = InterferenceSetting(float(theta))
        plus_g = np.array([combine(t, r, setting)[0] for t, r in zip(t_g, r_g)])
        plus_e = np.array([combine(t, r, setting)[0] for t, r in zip(t_e, r_e)])
        d_plus = np.abs(plus_e - plus_g)
        beta_end_to_end = 2.0 * d_plus.max() / (d_t.max() + d_r.max())
        rows.append([theta, enhancement_factor(float(theta)), beta_end_to_end])
    out.table("beta_curve", ["theta_rt_rad", "beta_analytic", "beta_end_to_end"], rows)


@_experiment("calibrate-theta")
def run_calibrate_theta(cfg: ExperimentConfig, out: _Outputs) -> None:
    from .presets import get_preset, list_presets

    grid = _frequency_grid(cfg)
    devices = []
    names = list_presets() if cfg.device_inline is None else []
    targets = [get_preset(n) for n in names] or [cfg.device()]
    gain_plus_t = 2.0 + 0.0j
    gain_plus_r = 3.0 + 1.0j
    for index, device in enumerate(targets):
        record = measured_ratios(device.cavity, 1.0, device.theta_rt)
        clean = estimate_theta_rt(record)
        entry = {
            "name": device.name,
            "theta_true_rad": device.theta_rt,
            "theta_rt_rad": clean.theta_rt,
            "consistency": clean.consistency,
        }
        if cfg.sigma_rel > 0.0:
            noisy = estimate_theta_rt(
                measured_ratios(
                    device.cavity,
                    1.0,
                    device.theta_rt,
                    noise_sigma=cfg.sigma_rel,
                    repetitions=cfg.repetitions,
                    seed=cfg.seed,
                    stream=index,
                )
            )
            entry["theta_noisy_rad"] = noisy.theta_rt
            entry["consistency_noisy"] = noisy.consistency
        a_t = np.empty(len(grid), dtype=complex)
        a_r = np.empty(len(grid), dtype=complex)
        for idx, omega in enumerate(grid):
            drive = DriveTone(omega_d=float(omega))
            a_t[idx] = transmission(device.cavity, QubitState.GROUND, drive)
            a_r[idx] = reflection(device.cavity, QubitState.GROUND, drive)
        freq_hz = grid / (2.0 * math.pi)
        spectrum_t = list(zip(freq_hz, a_t))
        spectrum_r = list(zip(freq_hz, a_r))
        spectrum_plus = list(zip(freq_hz, gain_plus_t * a_t + gain_plus_r * a_r))
        gains = fit_chain_gains(spectrum_t, spectrum_r, spectrum_plus)
        entry["gains"] = {
            "plus_over_t": [gains.ratio_plus_t.real, gains.ratio_plus_t.imag],
            "plus_over_r": [gains.ratio_plus_r.real, gains.ratio_plus_r.imag],
        }
        entry["residual"] = gains.residual
        devices.append(entry)
    out.report("calibrate_theta", {"devices": devices})


def _simulate_pair(cfg: ExperimentConfig, means: PointerPair, noise: ChainNoise, t_m: float, t1: float, p_thermal: float, seed: int, path: Path, shots: int):
    batches = {}
    for state, offset in ((QubitState.GROUND, 0), (QubitState.EXCITED, 1)):
        shot_cfg = ShotConfig(
            t_m=t_m,
            n_shots=shots,
            prepared_state=state,
            p_thermal=p_thermal,
            seed=seed + offset,
            path=path,
        )
        batches[state] = simulate_shots(means, noise, shot_cfg, t1, n_threads=cfg.threads)
    return batches[QubitState.GROUND], batches[QubitState.EXCITED]


@_experiment("single-shot")
def run_single_shot(cfg: ExperimentConfig, out: _Outputs) -> None:
    device = cfg.device()
    drive = DriveTone(omega_d=device.cavity.omega_r - device.cavity.chi)
    reports = {}
    for path, c0, seed_base in ((Path.T, cfg.c0_t, cfg.seed), (Path.PLUS, cfg.c0_plus, cfg.seed + 2)):
        means = pointer_means(device.cavity, drive, path, device.theta_rt)
        noise = ChainNoise(eta=cfg.eta, c0=c0)
        batch_g, batch_e = _simulate_pair(
            cfg, means, noise, cfg.t_m_s, device.t1, cfg.p_thermal, seed_base, path, cfg.shots
        )
        centers, count_g, count_e = histogram_batches(batch_g, batch_e, cfg.histogram_bins)
        out.table(
            f"single_shot_{path.value}_hist",
            ["bin_center", "count_g_prepared", "count_e_prepared"],
            zip(centers, count_g, count_e),
        )
        if cfg.write_shots:
            for tag, batch in (("ground", batch_g), ("excited", batch_e)):
                path_csv = out.file(f"single_shot_{path.value}_shots_{tag}", "csv")
                batch.to_csv(path_csv)
        analysis = analyze(batch_g, batch_e)
        reports[path.value] = json.loads(analysis.to_json())
        reports[path.value]["sigma_m"] = batch_g.sigma
        reports[path.value]["distance"] = means.distance
    out.report("single_shot_analysis", {"paths": reports})


@_experiment("error-vs-time")
def run_error_vs_time(cfg: ExperimentConfig, out: _Outputs) -> None:
    device = cfg.device()
    drive = DriveTone(omega_d=device.cavity.omega_r - device.cavity.chi)
    grid = np.geomspace(cfg.tm_min_s, cfg.tm_max_s, cfg.tm_points)
    means = {
        Path.T: pointer_means(device.cavity, drive, Path.T, device.theta_rt),
        Path.PLUS: pointer_means(device.cavity, drive, Path.PLUS, device.theta_rt),
    }
    c0s = {Path.T: cfg.c0_t, Path.PLUS: cfg.c0_plus}
    rows = []
    seed = cfg.seed
    jumpless_t1 = 1e9 * cfg.tm_max_s  # measurement error only: no jumps, no flips
    for t_m in grid:
        row = [float(t_m)]
        analytic = {}
        empirical = {}
        for path in (Path.T, Path.PLUS):
            sigma = c0s[path] / math.sqrt(t_m)
            analytic[path] = math.erfc(means[path].distance / (2.0 * math.sqrt(2.0) * sigma))
            noise = ChainNoise(eta=cfg.eta, c0=c0s[path])
            batch_g, batch_e = _simulate_pair(
                cfg, means[path], noise, float(t_m), jumpless_t1, 0.0, seed, path, cfg.shots
            )
            seed += 2
            p_eg = float(np.count_nonzero(batch_g.projections() > batch_g.threshold)) / cfg.shots
            p_ge = float(np.count_nonzero(batch_e.projections() <= batch_e.threshold)) / cfg.shots
            empirical[path] = p_eg + p_ge
        row += [
            analytic[Path.T],
            analytic[Path.PLUS],
            analytic[Path.PLUS] / analytic[Path.T],
            empirical[Path.T],
            empirical[Path.PLUS],
            empirical[Path.PLUS] / empirical[Path.T] if empirical[Path.T] > 0 else math.nan,
        ]
        rows.append(row)
    out.table(
        "error_vs_time",
        [
            "t_m_s",
            "eps_t_analytic",
            "eps_plus_analytic",
            "ratio_analytic",
            "eps_t_mc",
            "eps_plus_mc",
            "ratio_mc",
        ],
        rows,
    )


@_experiment("optimal-error")
def run_optimal_error(cfg: ExperimentConfig, out: _Outputs) -> None:
    device = cfg.device()
    t1_grid = np.geomspace(cfg.t1_min_s, cfg.t1_max_s, cfg.t1_points)
    for path, theta in ((Path.T, 0.0), (Path.PLUS, 0.0)):
        rows = []
        for t1 in t1_grid:
            params = ErrorModelParams(
                eta=cfg.eta,
                n_c=cfg.n_c,
                t1=float(t1),
                omega_q=device.omega_q,
                t_e=cfg.t_e_k,
                cavity=device.cavity,
                port=path,
                theta_rt=theta,
                include_thermal=cfg.include_thermal,
            )
            t_opt, budget = optimal_time(params)
            rows.append([t1, t_opt, budget.p_m, budget.p_t1, budget.p_th, budget.total])
        out.table(
            f"optimal_error_{path.value}",
            ["t1_s", "t_optimal_s", "p_m", "p_t1", "p_th", "total"],
            rows,
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hangersim",
        description="Interferometric dispersive-readout simulator (see module docstring for experiments)",
    )
    parser.add_argument("experiment", choices=sorted(EXPERIMENTS))
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--seed", type=int, help="override the run seed")
    parser.add_argument("--out", help="output directory (default: $HANGERSIM_OUT or .)")
    parser.add_argument("--threads", type=int, help="cap worker threads (results unchanged)")
    parser.add_argument("--format", choices=("csv", "json"), help="table output format")
    parser.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override one config entry (repeatable)",
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.overrides)
    if args.seed is not None:
        overrides.append(f"run.seed={args.seed}")
    if args.threads is not None:
        overrides.append(f"run.threads={args.threads}")
    if args.format is not None:
        overrides.append(f"run.format={args.format}")
    if args.out is not None:
        overrides.append(f"run.out={args.out}")
    try:
        cfg = load_config(args.config, overrides)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4

    out_dir = FsPath(cfg.out or os.environ.get(ENV_OUT_DIR, "") or ".")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
        outputs = _Outputs(cfg, args.experiment, out_dir)
        EXPERIMENTS[args.experiment](cfg, outputs)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except HangersimError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 4
    for path in outputs.written:
        print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
