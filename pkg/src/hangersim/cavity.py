"""Steady-state response of a symmetric hanger cavity dispersively coupled to a qubit.

The cavity (bare angular frequency ``omega_r``, coupling rate ``kappa_c`` to the
feedline, internal loss rate ``kappa_i``) is pulled by the qubit through the
dispersive shift ``chi``: the effective resonance sits at
``omega_r + chi * sigma_z``.  For a probe of angular frequency ``omega_d`` and
amplitude ``alpha_in`` the intracavity steady state is

    alpha = sqrt(kappa_c/2) * alpha_in / (1j*(omega_d - omega_r - chi*sigma_z) + kappa/2)

and the two feedline outputs are

    alpha_T = alpha_in - sqrt(kappa_c/2) * alpha    (transmitted)
    alpha_R =          - sqrt(kappa_c/2) * alpha    (reflected)

so ``alpha_T - alpha_R == alpha_in`` identically.  All frequencies and rates are
angular (rad/s); configuration files quote plain Hz and are converted on load.

The separation of the two pointer states (ground vs excited response at one
probe frequency) is identical on both paths:

    D = 4*kappa_c*|chi|*|alpha_in|
        / sqrt((kappa^2 + 4*chi^2 - 4*Delta^2)^2 + 16*kappa^2*Delta^2),

with ``Delta = omega_d - omega_r``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .exceptions import (
    GridError,
    InvalidParameterError,
    NonFiniteInputError,
    ZeroChiError,
)

__all__ = [
    "CavityParams",
    "QubitState",
    "DriveTone",
    "PointerPair",
    "RelaxationWindow",
    "Path",
    "intracavity_steady",
    "transmission",
    "reflection",
    "iq_circle",
    "pointer_distance",
    "ground_diameter",
    "relaxed_diameter",
]


class QubitState(enum.Enum):
    """Qubit eigenstate selecting the cavity pull ``chi * sigma_z``."""

    GROUND = -1
    EXCITED = +1

    @property
    def sigma_z(self) -> int:
        return self.value


class Path(str, enum.Enum):
    """Which output the detector looks at: transmission, reflection, or the
    constructive beamsplitter port combining both."""

    T = "t"
    R = "r"
    PLUS = "plus"


def _require_finite(name: str, value: complex) -> complex:
    value = complex(value)
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise NonFiniteInputError(f"{name} must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class CavityParams:
    """Hanger cavity rates, all angular (rad/s).

    ``chi`` carries its sign (negative for the devices shipped as presets).
    The total damping rate ``kappa`` is always derived, never stored.
    """

    omega_r: float
    kappa_c: float
    kappa_i: float
    chi: float

    def __post_init__(self):
        for name in ("omega_r", "kappa_c", "kappa_i", "chi"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise InvalidParameterError(f"{name} must be finite, got {v!r}")
        if self.omega_r <= 0.0:
            raise InvalidParameterError(f"omega_r must be > 0, got {self.omega_r!r}")
        if self.kappa_c <= 0.0:
            raise InvalidParameterError(f"kappa_c must be > 0, got {self.kappa_c!r}")
        if self.kappa_i < 0.0:
            raise InvalidParameterError(f"kappa_i must be >= 0, got {self.kappa_i!r}")

    @property
    def kappa(self) -> float:
        """Total damping rate kappa_c + kappa_i."""
        return self.kappa_c + self.kappa_i

    def require_chi(self) -> float:
        if self.chi == 0.0:
            raise ZeroChiError("dispersive shift chi is zero; pointer states coincide")
        return self.chi

    @classmethod
    def from_qualities(cls, f_r_hz: float, q_c: float, q_i: float, chi_hz: float) -> "CavityParams":
        """Build from a resonance frequency in Hz and quality factors.

        Uses kappa_c = omega_r / Q_c and kappa_i = omega_r / Q_i.
        """
        if q_c <= 0 or q_i <= 0:
            raise InvalidParameterError("quality factors must be positive")
        omega_r = 2.0 * math.pi * f_r_hz
        return cls(
            omega_r=omega_r,
            kappa_c=omega_r / q_c,
            kappa_i=omega_r / q_i,
            chi=2.0 * math.pi * chi_hz,
        )


@dataclass(frozen=True)
class DriveTone:
    """Probe tone: angular frequency and complex input amplitude.

    ``alpha_in`` is quoted in square-root photon-flux units; every quantity
    this package reports is either a ratio or normalized to ``|alpha_in|``,
    so the absolute scale never matters.
    """

    omega_d: float
    alpha_in: complex = 1.0 + 0.0j

    def __post_init__(self):
        if not math.isfinite(self.omega_d):
            raise InvalidParameterError(f"omega_d must be finite, got {self.omega_d!r}")
        object.__setattr__(self, "alpha_in", _require_finite("alpha_in", self.alpha_in))


@dataclass(frozen=True)
class PointerPair:
    """Output-field amplitudes conditioned on the qubit state, on one path."""

    alpha_g: complex
    alpha_e: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha_g", _require_finite("alpha_g", self.alpha_g))
        object.__setattr__(self, "alpha_e", _require_finite("alpha_e", self.alpha_e))

    @property
    def distance(self) -> float:
        """Phase-plane separation |alpha_e - alpha_g|."""
        return abs(self.alpha_e - self.alpha_g)


@dataclass(frozen=True)
class RelaxationWindow:
    """Measurement window against qubit energy relaxation.

    ``delta`` is the phase shift of the cavity response between the two qubit
    states; when omitted it defaults to 4*chi/kappa of the cavity the window
    is evaluated against.
    """

    t_m: float
    t1: float
    delta: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.t_m) and self.t_m >= 0.0):
            raise InvalidParameterError(f"t_m must be >= 0, got {self.t_m!r}")
        if not (math.isfinite(self.t1) and self.t1 > 0.0):
            raise InvalidParameterError(f"T1 must be > 0, got {self.t1!r}")
        if self.delta is not None and not math.isfinite(self.delta):
            raise InvalidParameterError(f"delta must be finite, got {self.delta!r}")


def intracavity_steady(c: CavityParams, q: QubitState, d: DriveTone) -> complex:
    """Steady-state intracavity amplitude for qubit state ``q``."""
    detuning = d.omega_d - c.omega_r - c.chi * q.sigma_z
    return math.sqrt(c.kappa_c / 2.0) * d.alpha_in / complex(c.kappa / 2.0, detuning)


def transmission(c: CavityParams, q: QubitState, d: DriveTone) -> complex:
    """Transmitted amplitude alpha_in - sqrt(kappa_c/2) * alpha."""
    return d.alpha_in - math.sqrt(c.kappa_c / 2.0) * intracavity_steady(c, q, d)


def reflection(c: CavityParams, q: QubitState, d: DriveTone) -> complex:
    """Reflected amplitude -sqrt(kappa_c/2) * alpha."""
    return -math.sqrt(c.kappa_c / 2.0) * intracavity_steady(c, q, d)


def iq_circle(
    c: CavityParams,
    q: QubitState,
    alpha_in: complex,
    freq_grid,
) -> list[tuple[float, complex, complex]]:
    """Transmission/reflection responses over a frequency sweep.

    Returns one ``(omega_d, alpha_T, alpha_R)`` tuple per grid point.  The
    grid must be nonempty and strictly increasing (rad/s).
    """
    grid = [float(f) for f in freq_grid]
    if not grid:
        raise GridError("frequency grid is empty")
    for a, b in zip(grid, grid[1:]):
        if not b > a:
            raise GridError("frequency grid must be strictly increasing")
    alpha_in = _require_finite("alpha_in", alpha_in)
    out = []
    for f in grid:
        drive = DriveTone(omega_d=f, alpha_in=alpha_in)
        out.append((f, transmission(c, q, drive), reflection(c, q, drive)))
    return out


def pointer_distance(c: CavityParams, d: DriveTone, path: Path = Path.T) -> float:
    """Closed-form pointer separation |alpha_e - alpha_g| on path T or R.

    The hanger is symmetric, so both paths give the same value; ``path`` is
    accepted for interface symmetry and validated only.
    """
    if Path(path) not in (Path.T, Path.R):
        raise InvalidParameterError(f"pointer_distance is defined for paths T and R, got {path!r}")
    chi = c.require_chi()
    delta = d.omega_d - c.omega_r
    k2 = c.kappa * c.kappa
    denom = math.hypot(k2 + 4.0 * chi * chi - 4.0 * delta * delta, 4.0 * c.kappa * delta)
    return 4.0 * c.kappa_c * abs(chi) * abs(d.alpha_in) / denom


def ground_diameter(c: CavityParams) -> float:
    """IQ-circle diameter kappa_c/kappa of the ground-state response,
    normalized to the input amplitude."""
    return c.kappa_c / c.kappa


def relaxed_diameter(c: CavityParams, w: RelaxationWindow) -> float:
    """Excited-state IQ-circle diameter shrunk by energy relaxation.

    For a measurement of duration ``t_m`` against relaxation time ``T1`` the
    excited response mixes into the ground one, giving (normalized to the
    input amplitude)

        d_e = (kappa_c/kappa) * |1 - x + x*exp(1j*delta)|,  x = exp(-t_m/(2*T1)).

    ``w.delta`` of ``None`` uses the default 4*chi/kappa.
    """
    delta = w.delta if w.delta is not None else 4.0 * c.chi / c.kappa
    x = math.exp(-w.t_m / (2.0 * w.t1))
    return ground_diameter(c) * abs(1.0 - x + x * cmath.exp(1j * delta))
