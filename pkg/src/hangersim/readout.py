"""Monte Carlo single-shot readout: pointer clouds, thresholding, histograms.

A shot integrates the output field for ``t_m`` and yields one (I, Q) pair:
the noiseless cloud center of the realized qubit state plus isotropic
Gaussian amplifier noise of per-quadrature deviation

    sigma_m = c0 / sqrt(t_m).

The prepared state can flip at initialization (thermal population) and an
excited qubit can relax during the window.  Two relaxation conventions are
supported: ``half-time`` (default) counts a jump in the first half of the
window as a full transition to the ground cloud, which makes the Monte Carlo
relaxation error reproduce 1 - exp(-t_m/(2*T1)); ``weighted`` records the
physical time-weighted mean (tau/t_m)*e + (1 - tau/t_m)*g.

States are assigned by projecting (I, Q) onto the line joining the two cloud
centers and comparing with a threshold voltage; for equal isotropic noise the
midpoint of the projected means is the minimum-error threshold.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cavity import CavityParams, DriveTone, Path, PointerPair, QubitState, reflection, transmission
from .exceptions import FitConvergenceError, InvalidParameterError
from .interference import InterferenceSetting, combine

__all__ = [
    "ChainNoise",
    "ShotConfig",
    "ShotBatch",
    "GaussianComponents",
    "ShotAnalysis",
    "RELAXATION_MODELS",
    "pointer_means",
    "simulate_shots",
    "optimal_threshold",
    "analyze",
    "gaussian_overlap",
    "rescale_variance",
    "histogram_batches",
    "bridge_c0",
]

RELAXATION_MODELS = ("half-time", "weighted")


@dataclass(frozen=True)
class ChainNoise:
    """Amplification-chain noise: efficiency eta = 1/(1 + N0) and the
    integrated-noise coefficient c0 with sigma_m = c0/sqrt(t_m)."""

    eta: float
    c0: float

    def __post_init__(self):
        if not (math.isfinite(self.eta) and 0.0 < self.eta <= 1.0):
            raise InvalidParameterError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not (math.isfinite(self.c0) and self.c0 > 0.0):
            raise InvalidParameterError(f"c0 must be > 0, got {self.c0!r}")

    @property
    def n0(self) -> float:
        """Added noise quanta, eta = 1/(1 + N0)."""
        return 1.0 / self.eta - 1.0

    @classmethod
    def from_added_noise(cls, n0: float, c0: float) -> "ChainNoise":
        if not (math.isfinite(n0) and n0 >= 0.0):
            raise InvalidParameterError(f"n0 must be >= 0, got {n0!r}")
        return cls(eta=1.0 / (1.0 + n0), c0=c0)

    def sigma_m(self, t_m: float) -> float:
        """Per-quadrature deviation of the integrated voltage."""
        if t_m <= 0.0:
            raise InvalidParameterError(f"t_m must be > 0, got {t_m!r}")
        return self.c0 / math.sqrt(t_m)


@dataclass(frozen=True)
class ShotConfig:
    """One Monte Carlo batch: what is prepared, for how long, and how often."""

    t_m: float
    n_shots: int
    prepared_state: QubitState
    p_thermal: float = 0.0
    seed: int = 0
    path: Path = Path.T
    relaxation_model: str = "half-time"

    def __post_init__(self):
        if not (math.isfinite(self.t_m) and self.t_m > 0.0):
            raise InvalidParameterError(f"t_m must be > 0, got {self.t_m!r}")
        if self.n_shots < 1:
            raise InvalidParameterError(f"n_shots must be >= 1, got {self.n_shots!r}")
        if not (0.0 <= self.p_thermal < 1.0):
            raise InvalidParameterError(f"p_thermal must lie in [0, 1), got {self.p_thermal!r}")
        if self.relaxation_model not in RELAXATION_MODELS:
            raise InvalidParameterError(
                f"relaxation_model must be one of {RELAXATION_MODELS}, got {self.relaxation_model!r}"
            )


@dataclass(frozen=True)
class ShotBatch:
    """Per-shot records of one simulated batch plus its geometry."""

    config: ShotConfig
    t1: float
    sigma: float
    means: PointerPair
    axis: complex
    threshold: float
    true_excited: np.ndarray
    jump_time: np.ndarray
    i: np.ndarray
    q: np.ndarray
    assigned_excited: np.ndarray

    @property
    def n_shots(self) -> int:
        return int(self.true_excited.size)

    def projections(self) -> np.ndarray:
        """Shots projected onto the inter-mean axis (detector volts)."""
        return self.i * self.axis.real + self.q * self.axis.imag

    def summary(self) -> dict:
        return {
            "n_shots": self.n_shots,
            "prepared": self.config.prepared_state.name.lower(),
            "n_true_excited": int(np.count_nonzero(self.true_excited)),
            "n_jumped": int(np.count_nonzero(~np.isnan(self.jump_time))),
            "n_assigned_excited": int(np.count_nonzero(self.assigned_excited)),
            "threshold": self.threshold,
        }

    def to_csv(self, path) -> None:
        """Write per-shot records: shot_index, true_state, jump_time_s, i_volts,
        q_volts, assigned."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["shot_index", "true_state", "jump_time_s", "i_volts", "q_volts", "assigned"])
            for idx in range(self.n_shots):
                jump = self.jump_time[idx]
                writer.writerow(
                    [
                        idx,
                        "e" if self.true_excited[idx] else "g",
                        "" if math.isnan(jump) else repr(float(jump)),
                        repr(float(self.i[idx])),
                        repr(float(self.q[idx])),
                        "e" if self.assigned_excited[idx] else "g",
                    ]
                )


@dataclass(frozen=True)
class GaussianComponents:
    """Two-component 1-D Gaussian mixture fit."""

    means: tuple[float, float]
    sigmas: tuple[float, float]
    weights: tuple[float, float]
    n_iterations: int


@dataclass(frozen=True)
class ShotAnalysis:
    """Threshold counting plus the two-Gaussian decomposition of both batches."""

    threshold: float
    p_e_given_g: float
    p_g_given_e: float
    epsilon: float
    gaussian_overlap_error: float
    fit_g: GaussianComponents
    fit_e: GaussianComponents

    def to_json(self) -> str:
        doc = {
            "threshold": self.threshold,
            "p_e_given_g": self.p_e_given_g,
            "p_g_given_e": self.p_g_given_e,
            "epsilon": self.epsilon,
            "gaussian_overlap_error": self.gaussian_overlap_error,
            "fit_g": {"means": self.fit_g.means, "sigmas": self.fit_g.sigmas, "weights": self.fit_g.weights},
            "fit_e": {"means": self.fit_e.means, "sigmas": self.fit_e.sigmas, "weights": self.fit_e.weights},
        }
        return json.dumps(doc, sort_keys=True, indent=2)


def pointer_means(
    c: CavityParams, d: DriveTone, path: Path = Path.T, theta_rt: float = 0.0
) -> PointerPair:
    """Noiseless cloud centers for ground/excited on the chosen output path."""
    drive_t = PointerPair(
        alpha_g=transmission(c, QubitState.GROUND, d),
        alpha_e=transmission(c, QubitState.EXCITED, d),
    )
    path = Path(path)
    if path is Path.T:
        return drive_t
    pair_r = PointerPair(
        alpha_g=reflection(c, QubitState.GROUND, d),
        alpha_e=reflection(c, QubitState.EXCITED, d),
    )
    if path is Path.R:
        return pair_r
    setting = InterferenceSetting(theta_rt)
    plus_g, _ = combine(drive_t.alpha_g, pair_r.alpha_g, setting)
    plus_e, _ = combine(drive_t.alpha_e, pair_r.alpha_e, setting)
    return PointerPair(alpha_g=plus_g, alpha_e=plus_e)


def _discrimination_axis(means: PointerPair) -> complex:
    d = means.alpha_e - means.alpha_g
    dist = abs(d)
    if dist == 0.0:
        raise InvalidParameterError("pointer means coincide; no discrimination axis")
    return d / dist


def optimal_threshold(means: PointerPair, sigma: float) -> float:
    """Minimum-error threshold along the inter-mean axis.

    For two equal, isotropic Gaussian clouds this is the midpoint of the
    projected means; ``sigma`` is validated but does not move the midpoint.
    """
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise InvalidParameterError(f"sigma must be > 0, got {sigma!r}")
    axis = _discrimination_axis(means)
    mid = (means.alpha_g + means.alpha_e) / 2.0
    return mid.real * axis.real + mid.imag * axis.imag


def simulate_shots(
    means: PointerPair,
    noise: ChainNoise,
    cfg: ShotConfig,
    t1: float,
    n_threads: int = 1,
) -> ShotBatch:
    """Simulate one batch of single shots.

    Results are a pure function of ``(cfg.seed, shot index)``: any thread
    count, chunking, or backend (compiled vs numpy) yields the same batch.
    Shots are assigned with the midpoint threshold of ``means``; use
    :func:`analyze` to re-count against a different threshold.
    """
    if not (math.isfinite(t1) and t1 > 0.0):
        raise InvalidParameterError(f"T1 must be > 0, got {t1!r}")
    if n_threads < 1:
        raise InvalidParameterError(f"n_threads must be >= 1, got {n_threads!r}")
    sigma = noise.sigma_m(cfg.t_m)
    axis = _discrimination_axis(means)
    threshold = optimal_threshold(means, sigma)

    n = cfg.n_shots
    true_excited = np.empty(n, dtype=np.uint8)
    jump_time = np.empty(n, dtype=np.float64)
    out_i = np.empty(n, dtype=np.float64)
    out_q = np.empty(n, dtype=np.float64)

    def run_chunk(a: int, b: int) -> None:
        kernels.simulate_quadratures(
            cfg.seed & (2**64 - 1),
            a,
            cfg.prepared_state is QubitState.EXCITED,
            cfg.p_thermal,
            cfg.t_m,
            t1,
            means.alpha_g.real,
            means.alpha_g.imag,
            means.alpha_e.real,
            means.alpha_e.imag,
            sigma,
            cfg.relaxation_model == "half-time",
            true_excited[a:b],
            jump_time[a:b],
            out_i[a:b],
            out_q[a:b],
        )

    workers = min(n_threads, n)
    if workers == 1:
        run_chunk(0, n)
    else:
        chunk = -(-n // workers)
        bounds = [(a, min(a + chunk, n)) for a in range(0, n, chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            for future in [pool.submit(run_chunk, a, b) for a, b in bounds]:
                future.result()

    projections = out_i * axis.real + out_q * axis.imag
    return ShotBatch(
        config=cfg,
        t1=t1,
        sigma=sigma,
        means=means,
        axis=axis,
        threshold=threshold,
        true_excited=true_excited,
        jump_time=jump_time,
        i=out_i,
        q=out_q,
        assigned_excited=projections > threshold,
    )


def _fit_two_gaussians(
    x: np.ndarray,
    mean_init: tuple[float, float],
    sigma_init: float,
    max_iterations: int = 200,
    tolerance: float = 1e-8,
) -> GaussianComponents:
    """Expectation-maximization for a two-component 1-D Gaussian mixture."""
    mu = np.array(mean_init, dtype=float)
    sig = np.array([sigma_init, sigma_init], dtype=float)
    w = np.array([0.5, 0.5])
    floor = 1e-12 * max(sigma_init, abs(mu[1] - mu[0]), 1.0)
    last_ll = -np.inf
    for iteration in range(1, max_iterations + 1):
        log_pdf = (
            -0.5 * ((x[:, None] - mu[None, :]) / sig[None, :]) ** 2
            - np.log(sig[None, :] * math.sqrt(2.0 * math.pi))
            + np.log(w[None, :])
        )
        top = log_pdf.max(axis=1, keepdims=True)
        norm = top[:, 0] + np.log(np.exp(log_pdf - top).sum(axis=1))
        ll = float(norm.mean())
        resp = np.exp(log_pdf - norm[:, None])
        mass = resp.sum(axis=0)
        mass = np.maximum(mass, 1e-300)
        mu = (resp * x[:, None]).sum(axis=0) / mass
        var = (resp * (x[:, None] - mu[None, :]) ** 2).sum(axis=0) / mass
        sig = np.maximum(np.sqrt(var), floor)
        w = mass / x.size
        if abs(ll - last_ll) <= tolerance * (1.0 + abs(ll)):
            return GaussianComponents(
                means=(float(mu[0]), float(mu[1])),
                sigmas=(float(sig[0]), float(sig[1])),
                weights=(float(w[0]), float(w[1])),
                n_iterations=iteration,
            )
        last_ll = ll
    raise FitConvergenceError(
        f"two-Gaussian fit did not converge in {max_iterations} iterations"
    )


def _normal_cdf(x: float, mu: float, sigma: float) -> float:
    return 0.5 * (1.0 + math.erf((x - mu) / (sigma * math.sqrt(2.0))))


def gaussian_overlap(mu1: float, sigma1: float, mu2: float, sigma2: float) -> float:
    """Overlap integral of two unit-mass Gaussians, int min(p1, p2) dx."""
    if sigma1 <= 0.0 or sigma2 <= 0.0:
        raise InvalidParameterError("sigmas must be > 0")
    if mu1 == mu2 and sigma1 == sigma2:
        return 1.0
    if abs(sigma1 - sigma2) <= 1e-12 * max(sigma1, sigma2):
        return math.erfc(abs(mu2 - mu1) / (2.0 * math.sqrt(2.0) * sigma1))
    # densities cross twice; between the crossings one component lies below
    a = 1.0 / sigma2**2 - 1.0 / sigma1**2
    b = 2.0 * (mu1 / sigma1**2 - mu2 / sigma2**2)
    c = mu2**2 / sigma2**2 - mu1**2 / sigma1**2 + 2.0 * math.log(sigma2 / sigma1)
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:  # tangency of near-identical densities
        return 1.0
    x_lo = (-b - math.sqrt(disc)) / (2.0 * a)
    x_hi = (-b + math.sqrt(disc)) / (2.0 * a)
    if x_lo > x_hi:
        x_lo, x_hi = x_hi, x_lo
    # the narrower density owns both far tails, so between the two crossings
    # the minimum is the wider one
    if sigma1 > sigma2:
        (mu_in, s_in), (mu_out, s_out) = (mu1, sigma1), (mu2, sigma2)
    else:
        (mu_in, s_in), (mu_out, s_out) = (mu2, sigma2), (mu1, sigma1)
    inner = _normal_cdf(x_hi, mu_in, s_in) - _normal_cdf(x_lo, mu_in, s_in)
    outer = 1.0 - (_normal_cdf(x_hi, mu_out, s_out) - _normal_cdf(x_lo, mu_out, s_out))
    return inner + outer


def analyze(batch_g: ShotBatch, batch_e: ShotBatch, v_th: float | None = None) -> ShotAnalysis:
    """Count assignment errors and fit the two-Gaussian structure of both batches.

    ``v_th`` defaults to the batches' midpoint threshold.  The Gaussian
    overlap error is the overlap integral of the matching components: the
    ground component of the ground-prepared batch against the excited
    component of the excited-prepared batch.
    """
    if batch_g.n_shots == 0 or batch_e.n_shots == 0:
        raise InvalidParameterError("batches must be nonempty")
    if batch_g.means != batch_e.means:
        raise InvalidParameterError("batches were simulated against different pointer means")
    if v_th is None:
        v_th = batch_g.threshold
    proj_g = batch_g.projections()
    proj_e = batch_e.projections()
    p_e_given_g = float(np.count_nonzero(proj_g > v_th)) / proj_g.size
    p_g_given_e = float(np.count_nonzero(proj_e <= v_th)) / proj_e.size

    axis = batch_g.axis
    mu_g = batch_g.means.alpha_g.real * axis.real + batch_g.means.alpha_g.imag * axis.imag
    mu_e = batch_g.means.alpha_e.real * axis.real + batch_g.means.alpha_e.imag * axis.imag
    fit_g = _fit_two_gaussians(proj_g, (mu_g, mu_e), batch_g.sigma)
    fit_e = _fit_two_gaussians(proj_e, (mu_g, mu_e), batch_e.sigma)

    def component_near(fit: GaussianComponents, target: float) -> tuple[float, float]:
        k = 0 if abs(fit.means[0] - target) <= abs(fit.means[1] - target) else 1
        return fit.means[k], fit.sigmas[k]

    m_g, s_g = component_near(fit_g, mu_g)
    m_e, s_e = component_near(fit_e, mu_e)
    return ShotAnalysis(
        threshold=float(v_th),
        p_e_given_g=p_e_given_g,
        p_g_given_e=p_g_given_e,
        epsilon=p_e_given_g + p_g_given_e,
        gaussian_overlap_error=gaussian_overlap(m_g, s_g, m_e, s_e),
        fit_g=fit_g,
        fit_e=fit_e,
    )


def rescale_variance(sigma: float, c0_num: float, c0_den: float) -> float:
    """Rescale a measured deviation between chains of different efficiency:
    sigma * c0_num / c0_den."""
    for name, v in (("sigma", sigma), ("c0_num", c0_num), ("c0_den", c0_den)):
        if not (math.isfinite(v) and v > 0.0):
            raise InvalidParameterError(f"{name} must be > 0, got {v!r}")
    return sigma * c0_num / c0_den


def histogram_batches(
    batch_g: ShotBatch, batch_e: ShotBatch, n_bins: int = 60
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Shared-axis histograms of the projected voltages of both batches.

    Returns (bin_centers, counts_g_prepared, counts_e_prepared).
    """
    if n_bins < 1:
        raise InvalidParameterError(f"n_bins must be >= 1, got {n_bins!r}")
    proj_g = batch_g.projections()
    proj_e = batch_e.projections()
    lo = min(proj_g.min(), proj_e.min())
    hi = max(proj_g.max(), proj_e.max())
    edges = np.linspace(lo, hi, n_bins + 1)
    counts_g, _ = np.histogram(proj_g, bins=edges)
    counts_e, _ = np.histogram(proj_e, bins=edges)
    return 0.5 * (edges[:-1] + edges[1:]), counts_g, counts_e


def bridge_c0(means: PointerPair, eta: float, pointer_rate: float) -> float:
    """The c0 that makes the voltage-domain assignment error coincide with the
    rate-domain formula erfc(sqrt(eta*t_m)*D/sqrt(2)): c0 = D_volts/(2*sqrt(eta)*D)."""
    if not (0.0 < eta <= 1.0):
        raise InvalidParameterError(f"eta must lie in (0, 1], got {eta!r}")
    if pointer_rate <= 0.0:
        raise InvalidParameterError(f"pointer_rate must be > 0, got {pointer_rate!r}")
    if means.distance == 0.0:
        raise InvalidParameterError("pointer means coincide")
    return means.distance / (2.0 * math.sqrt(eta) * pointer_rate)
