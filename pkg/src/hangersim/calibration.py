"""Calibration of the interference phase and of the amplification chains.

Relative phase
--------------
The phase ``theta_rt`` between the reflection and transmission paths cannot be
read off a single output line (each line carries its own unknown propagation
phase and gain).  It is instead reconstructed from quantities that are
invariant under per-line phases: the qubit-state ratios measured on each line
with the probe parked at ``omega_r - chi`` (resonant with the ground-state
cavity),

    gamma_t    = alpha_e_T / alpha_g_T
    gamma_r    = alpha_g_R / alpha_e_R      (note: ground over excited)
    gamma_plus = alpha_e_plus / alpha_g_plus

together with the transmitted-energy fractions

    r_g = (kappa_c^2 + kappa_i^2) / (kappa_c + kappa_i)^2
    r_e = 1 - 2*kappa_c*kappa_i / ((kappa_c + kappa_i)^2 + 16*chi^2).

The line amplitudes are recovered (in the gauge where the ground transmission
and the excited reflection are real and positive) as

    alpha_g_T = sqrt(N) * sqrt((r_g - r_e|gamma_r|^2) / (1 - |gamma_t*gamma_r|^2))
    alpha_e_T = gamma_t * alpha_g_T
    alpha_e_R = sqrt(N) * sqrt((r_e - r_g|gamma_t|^2) / (1 - |gamma_t*gamma_r|^2))
    alpha_g_R = gamma_r * alpha_e_R

and the phase follows in closed form:

    exp(1j*theta_rt) = (gamma_t - gamma_plus) * sqrt(r_g - r_e|gamma_r|^2)
                       / ((gamma_plus*gamma_r - 1) * sqrt(r_e - r_g|gamma_t|^2)).

For consistent data the result has unit modulus; the modulus itself is
reported as a consistency score.  ``theta_rt`` is, by this construction, the
splitter phase expressed in the gauge above; any extra per-line phase offset
is absorbed into it (shifting an R-line phase by phi shifts the estimate by
exactly +phi).

Chain gains
-----------
The constructive-port line is a gained copy of the sum of the other two, so
over any frequency sweep

    A_plus(w) = (c_plus/c_t) * A_t(w) + (c_plus/c_r) * A_r(w),

a complex linear regression with two unknowns, solved by least squares.
"""

from __future__ import annotations

import cmath
import csv
import json
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .cavity import CavityParams, DriveTone, QubitState, reflection, transmission
from .exceptions import (
    DegenerateRecordError,
    GridError,
    GridMismatchError,
    InconsistentDataError,
    InconsistentDataWarning,
    InvalidParameterError,
    RankDeficiencyError,
)
from .interference import InterferenceSetting, combine
from .kernels import numpy_backend as _rng

__all__ = [
    "LossFactors",
    "CalibrationRecord",
    "ChainGains",
    "ThetaEstimate",
    "loss_factors",
    "measured_ratios",
    "reconstruct_amplitudes",
    "estimate_theta_rt",
    "fit_chain_gains",
    "read_spectrum_csv",
    "write_spectrum_csv",
    "calibration_report_json",
]

CONSISTENCY_WARN = 0.05
CONSISTENCY_ERROR = 0.5


@dataclass(frozen=True)
class LossFactors:
    """Fractions of the probe energy that survive the cavity, per qubit state."""

    r_g: float
    r_e: float

    def __post_init__(self):
        for name in ("r_g", "r_e"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise InvalidParameterError(f"{name} must lie in [0, 1], got {v!r}")


@dataclass(frozen=True)
class CalibrationRecord:
    """The measurable ratios of one phase-calibration run.

    ``photon_number`` is the dimensionless probe energy N entering the
    energy-conservation relations |a_g_T|^2 + |a_g_R|^2 = r_g*N (and r_e*N).
    """

    gamma_t: complex
    gamma_r: complex
    gamma_plus: complex
    photon_number: float
    loss: LossFactors

    def __post_init__(self):
        for name in ("gamma_t", "gamma_r", "gamma_plus"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidParameterError(f"{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)
        if not (math.isfinite(self.photon_number) and self.photon_number >= 0.0):
            raise InvalidParameterError(
                f"photon_number must be >= 0, got {self.photon_number!r}"
            )
        if self._gauge_denominator() == 0.0:
            raise DegenerateRecordError(
                "|gamma_t * gamma_r| is 1: the amplitude reconstruction is degenerate"
            )

    def _gauge_denominator(self) -> float:
        return 1.0 - abs(self.gamma_t * self.gamma_r) ** 2

    def reconstruction_arguments(self) -> tuple[float, float]:
        """The two square-root arguments of the amplitude reconstruction.

        Both must be positive for a physically consistent record (for real
        data the numerators and the denominator are all negative together).
        """
        den = self._gauge_denominator()
        u = (self.loss.r_g - self.loss.r_e * abs(self.gamma_r) ** 2) / den
        v = (self.loss.r_e - self.loss.r_g * abs(self.gamma_t) ** 2) / den
        return u, v


@dataclass(frozen=True)
class ChainGains:
    """Complex gain ratios of the constructive-port line over the T and R lines."""

    ratio_plus_t: complex
    ratio_plus_r: complex
    residual: float

    def __post_init__(self):
        for name in ("ratio_plus_t", "ratio_plus_r"):
            v = complex(getattr(self, name))
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise InvalidParameterError(f"{name} must be finite, got {v!r}")
        if not (math.isfinite(self.residual) and self.residual >= 0.0):
            raise InvalidParameterError(f"residual must be >= 0, got {self.residual!r}")


@dataclass(frozen=True)
class ThetaEstimate:
    """Result of the phase reconstruction: angle plus unit-modulus score."""

    theta_rt: float
    consistency: float


def loss_factors(c: CavityParams) -> LossFactors:
    """Closed-form transmitted-energy fractions at the probe ``omega_r - chi``."""
    kc, ki, chi = c.kappa_c, c.kappa_i, c.chi
    total_sq = (kc + ki) ** 2
    r_g = (kc * kc + ki * ki) / total_sq
    r_e = 1.0 - 2.0 * kc * ki / (total_sq + 16.0 * chi * chi)
    return LossFactors(r_g=r_g, r_e=r_e)


def _forward_amplitudes(c: CavityParams, alpha_in: complex) -> tuple[complex, complex, complex, complex]:
    """Gauge-aligned line amplitudes (a_g_T, a_e_T, a_g_R, a_e_R) at omega_r - chi.

    The T line is referenced to its ground response and the R line to its
    excited response, the frame in which theta_rt is defined.
    """
    drive = DriveTone(omega_d=c.omega_r - c.chi, alpha_in=alpha_in)
    a_g_t = transmission(c, QubitState.GROUND, drive)
    a_e_t = transmission(c, QubitState.EXCITED, drive)
    a_g_r = reflection(c, QubitState.GROUND, drive)
    a_e_r = reflection(c, QubitState.EXCITED, drive)
    if abs(a_g_t) == 0.0 or abs(a_e_r) == 0.0:
        raise DegenerateRecordError(
            "a reference amplitude vanishes at the calibration drive "
            "(lossless cavity on resonance); ratios are undefined"
        )
    phase_t = a_g_t / abs(a_g_t)
    phase_r = a_e_r / abs(a_e_r)
    return a_g_t / phase_t, a_e_t / phase_t, a_g_r / phase_r, a_e_r / phase_r


def measured_ratios(
    c: CavityParams,
    alpha_in: complex,
    theta_rt: float,
    *,
    noise_sigma: float = 0.0,
    repetitions: int = 1,
    seed: int = 0,
    stream: int = 0,
) -> CalibrationRecord:
    """Synthesize the calibration measurement for a device with a known phase.

    The probe sits at ``omega_r - chi``; the six line amplitudes (T, R and
    constructive port, for both qubit states) are evaluated from the steady
    state, optionally smeared with complex Gaussian noise of relative scale
    ``noise_sigma`` per amplitude, averaged over ``repetitions``, and turned
    into the three ratios.  Noise draws are counter-derived from
    ``(seed, stream)``, so repeated calls and any parallel schedule agree.
    """
    if noise_sigma < 0.0:
        raise InvalidParameterError(f"noise_sigma must be >= 0, got {noise_sigma!r}")
    if repetitions < 1:
        raise InvalidParameterError(f"repetitions must be >= 1, got {repetitions!r}")
    a_g_t, a_e_t, a_g_r, a_e_r = _forward_amplitudes(c, alpha_in)
    setting = InterferenceSetting(theta_rt)
    plus_g, _ = combine(a_g_t, a_g_r, setting)
    plus_e, _ = combine(a_e_t, a_e_r, setting)

    truth = np.array([a_g_t, a_e_t, a_g_r, a_e_r, plus_g, plus_e], dtype=complex)
    if noise_sigma > 0.0:
        z = _rng.standard_normals(seed, stream, 2 * 6 * repetitions)
        z = (z[0::2] + 1j * z[1::2]).reshape(repetitions, 6) / math.sqrt(2.0)
        measured = (truth[None, :] + noise_sigma * np.abs(truth)[None, :] * z).mean(axis=0)
    else:
        measured = truth

    m_g_t, m_e_t, m_g_r, m_e_r, m_plus_g, m_plus_e = measured
    if min(abs(m_g_t), abs(m_e_r), abs(m_plus_g)) == 0.0:
        raise DegenerateRecordError("a measured reference amplitude vanished")
    return CalibrationRecord(
        gamma_t=m_e_t / m_g_t,
        gamma_r=m_g_r / m_e_r,
        gamma_plus=m_plus_e / m_plus_g,
        photon_number=abs(alpha_in) ** 2,
        loss=loss_factors(c),
    )


def reconstruct_amplitudes(rec: CalibrationRecord) -> tuple[complex, complex, complex, complex]:
    """Line amplitudes (a_g_T, a_e_T, a_g_R, a_e_R) recovered from a record.

    The result lives in the gauge with a_g_T and a_e_R real and positive; it
    satisfies the energy constraints |a_g_T|^2 + |a_g_R|^2 = r_g * N and
    |a_e_T|^2 + |a_e_R|^2 = r_e * N exactly.
    """
    u, v = rec.reconstruction_arguments()
    if u <= 0.0 or v <= 0.0:
        raise DegenerateRecordError(
            f"non-positive square-root argument in amplitude reconstruction "
            f"(arguments {u:.3e}, {v:.3e})"
        )
    root_n = math.sqrt(rec.photon_number)
    a_g_t = root_n * math.sqrt(u)
    a_e_r = root_n * math.sqrt(v)
    return a_g_t, rec.gamma_t * a_g_t, rec.gamma_r * a_e_r, a_e_r


def estimate_theta_rt(
    rec: CalibrationRecord,
    *,
    consistency_warn: float = CONSISTENCY_WARN,
    consistency_error: float = CONSISTENCY_ERROR,
) -> ThetaEstimate:
    """Reconstruct the splitter phase from one calibration record.

    Returns the principal argument of the closed-form unit phasor together
    with its modulus.  A modulus far from one means the ratios do not belong
    to a single consistent measurement: beyond ``consistency_warn`` a warning
    is issued, beyond ``consistency_error`` the record is rejected.
    """
    denominator = rec.gamma_plus * rec.gamma_r - 1.0
    if denominator == 0.0:
        raise DegenerateRecordError(
            "gamma_plus * gamma_r is 1: the phase reconstruction is degenerate"
        )
    num_arg = rec.loss.r_g - rec.loss.r_e * abs(rec.gamma_r) ** 2
    den_arg = rec.loss.r_e - rec.loss.r_g * abs(rec.gamma_t) ** 2
    if num_arg == 0.0 or den_arg == 0.0 or (num_arg > 0.0) != (den_arg > 0.0):
        raise DegenerateRecordError(
            f"square-root arguments have inconsistent signs ({num_arg:.3e}, {den_arg:.3e})"
        )
    phasor = (
        (rec.gamma_t - rec.gamma_plus)
        / denominator
        * math.sqrt(num_arg / den_arg)
    )
    consistency = abs(phasor)
    if abs(consistency - 1.0) > consistency_error:
        raise InconsistentDataError(
            f"phase reconstruction modulus {consistency:.4f} is too far from 1"
        )
    if abs(consistency - 1.0) > consistency_warn:
        warnings.warn(
            f"phase reconstruction modulus {consistency:.4f} deviates from 1",
            InconsistentDataWarning,
            stacklevel=2,
        )
    return ThetaEstimate(theta_rt=cmath.phase(phasor), consistency=consistency)


def _as_spectrum_arrays(spectrum) -> tuple[np.ndarray, np.ndarray]:
    freqs = np.asarray([p[0] for p in spectrum], dtype=float)
    amps = np.asarray([complex(p[1]) for p in spectrum], dtype=complex)
    return freqs, amps


def fit_chain_gains(spectrum_t, spectrum_r, spectrum_plus) -> ChainGains:
    """Least-squares gain ratios relating the three amplified spectra.

    The spectra are sequences of ``(frequency, amplitude)`` points sharing one
    frequency grid of at least three points; all points are weighted equally.
    The residual is the root-mean-square misfit.
    """
    f_t, a_t = _as_spectrum_arrays(spectrum_t)
    f_r, a_r = _as_spectrum_arrays(spectrum_r)
    f_p, a_p = _as_spectrum_arrays(spectrum_plus)
    if not (np.array_equal(f_t, f_r) and np.array_equal(f_t, f_p)):
        raise GridMismatchError("the three spectra must share one frequency grid")
    design = np.column_stack([a_t, a_r])
    singular = np.linalg.svd(design, compute_uv=False)
    if singular[0] == 0.0 or singular[-1] <= 1e-12 * singular[0]:
        raise RankDeficiencyError(
            "transmission and reflection spectra are collinear over the grid"
        )
    if f_t.size < 3:
        raise GridError(f"need at least 3 grid points, got {f_t.size}")
    solution, _, _, _ = np.linalg.lstsq(design, a_p, rcond=None)
    misfit = a_p - design @ solution
    residual = float(np.sqrt(np.mean(np.abs(misfit) ** 2)))
    return ChainGains(
        ratio_plus_t=complex(solution[0]),
        ratio_plus_r=complex(solution[1]),
        residual=residual,
    )


def read_spectrum_csv(path) -> list[tuple[float, complex]]:
    """Read a spectrum from CSV columns (frequency_hz, re, im)."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        header = next(reader)
        if [h.strip() for h in header] != ["frequency_hz", "re", "im"]:
            raise InvalidParameterError(
                f"expected spectrum header 'frequency_hz,re,im', got {header!r}"
            )
        for row in reader:
            if not row:
                continue
            out.append((float(row[0]), complex(float(row[1]), float(row[2]))))
    return out


def write_spectrum_csv(path, spectrum) -> None:
    """Write a spectrum as CSV columns (frequency_hz, re, im)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["frequency_hz", "re", "im"])
        for freq, amp in spectrum:
            amp = complex(amp)
            writer.writerow([repr(float(freq)), repr(amp.real), repr(amp.imag)])


def calibration_report_json(
    estimate: ThetaEstimate, gains: ChainGains | None = None
) -> str:
    """Serialize a calibration result as a stable JSON document."""
    doc = {
        "theta_rt_rad": estimate.theta_rt,
        "consistency": estimate.consistency,
        "gains": None
        if gains is None
        else {
            "plus_over_t": [gains.ratio_plus_t.real, gains.ratio_plus_t.imag],
            "plus_over_r": [gains.ratio_plus_r.real, gains.ratio_plus_r.imag],
        },
        "residual": None if gains is None else gains.residual,
    }
    return json.dumps(doc, sort_keys=True, indent=2)
