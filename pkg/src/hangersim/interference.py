"""Beamsplitter combination of the transmission and reflection outputs.

The two feedline outputs interfere on a balanced splitter after picking up a
relative propagation phase ``theta_rt``:

    plus  = (alpha_T + exp(1j*theta_rt) * alpha_R) / sqrt(2)
    minus = (alpha_T - exp(1j*theta_rt) * alpha_R) / sqrt(2)

Because the hanger responds symmetrically, the ground/excited differences on
T and R are identical, so the pointer separation on the plus port is a pure
rescaling of the single-path one:

    D_plus = |1 + exp(1j*theta_rt)| / sqrt(2) * D_T = sqrt(2)*cos(theta_rt/2) * D_T.

``sqrt(2)*cos(theta_rt/2)`` is the enhancement factor of the constructive
port; the complementary port carries ``sqrt(2)*|sin(theta_rt/2)|``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

from .cavity import PointerPair, _require_finite
from .exceptions import InconsistentPairError, InvalidParameterError

__all__ = [
    "Port",
    "InterferenceSetting",
    "normalize_phase",
    "combine",
    "interference_distance",
    "enhancement_factor",
    "path_phase_from_spacing",
]

_SQRT2 = math.sqrt(2.0)


class Port(enum.Enum):
    """Beamsplitter output: PLUS carries T + e^{i theta} R, MINUS the difference."""

    PLUS = +1
    MINUS = -1


def normalize_phase(theta: float) -> float:
    """Wrap an angle to the principal interval (-pi, pi]."""
    if not math.isfinite(theta):
        raise InvalidParameterError(f"phase must be finite, got {theta!r}")
    t = math.remainder(theta, math.tau)
    if t <= -math.pi:
        t += math.tau
    return t


@dataclass(frozen=True)
class InterferenceSetting:
    """Relative R-vs-T phase at the splitter plus the observed port."""

    theta_rt: float
    port: Port = Port.PLUS

    def __post_init__(self):
        object.__setattr__(self, "theta_rt", normalize_phase(self.theta_rt))


def combine(alpha_t: complex, alpha_r: complex, s: InterferenceSetting) -> tuple[complex, complex]:
    """Both splitter outputs (plus, minus) for one pair of path amplitudes."""
    alpha_t = _require_finite("alpha_t", alpha_t)
    alpha_r = _require_finite("alpha_r", alpha_r)
    rotated = cmath.exp(1j * s.theta_rt) * alpha_r
    return (alpha_t + rotated) / _SQRT2, (alpha_t - rotated) / _SQRT2


def _port_scale(theta_rt: float, port: Port) -> float:
    half = 0.5 * theta_rt
    if port is Port.PLUS:
        return _SQRT2 * math.cos(half)
    return _SQRT2 * abs(math.sin(half))


def interference_distance(pair_t: PointerPair, pair_r: PointerPair, s: InterferenceSetting) -> float:
    """Pointer separation on the chosen splitter port.

    ``pair_t`` and ``pair_r`` must come from the same drive; for any such
    pair the T and R differences both equal alpha_in, so the two pairs are
    rejected when (alpha_T - alpha_R) disagrees between the qubit states.
    """
    in_g = pair_t.alpha_g - pair_r.alpha_g
    in_e = pair_t.alpha_e - pair_r.alpha_e
    scale = max(abs(in_g), abs(in_e), pair_t.distance, pair_r.distance)
    if abs(in_e - in_g) > 1e-9 * scale:
        raise InconsistentPairError(
            "pointer pairs do not share one drive: alpha_T - alpha_R differs "
            f"between qubit states by {abs(in_e - in_g):.3e}"
        )
    return abs(_port_scale(s.theta_rt, s.port)) * pair_t.distance


def enhancement_factor(theta_rt: float, port: Port = Port.PLUS) -> float:
    """Separation gain of the splitter port over a single path.

    sqrt(2)*cos(theta/2) on the constructive port (up to sqrt(2) at theta=0;
    zero at theta=pi), sqrt(2)*|sin(theta/2)| on the other.
    """
    return _port_scale(normalize_phase(theta_rt), port)


def path_phase_from_spacing(position_offset: float, wavelength: float) -> float:
    """theta_rt contribution of a cavity sitting ``position_offset`` along the
    feedline: the reflected signal travels the offset twice, so the phase is
    2*pi*(2*offset)/wavelength, wrapped to (-pi, pi]."""
    if not (math.isfinite(wavelength) and wavelength > 0.0):
        raise InvalidParameterError(f"wavelength must be > 0, got {wavelength!r}")
    if not math.isfinite(position_offset):
        raise InvalidParameterError(f"position_offset must be finite, got {position_offset!r}")
    return normalize_phase(math.tau * (2.0 * position_offset) / wavelength)
