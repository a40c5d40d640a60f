"""Closed-form readout error budget and its optimum over measurement time.

The total single-shot error is modeled as the sum of the Gaussian-overlap
measurement error and the relaxation error,

    P_err(t_m) = [1 - erf(sqrt(eta*t_m)*D/sqrt(2))] + [1 - exp(-t_m/(2*T1))],

optionally plus the (t_m-independent) thermal-initialization error
exp(-hbar*omega_q/(k_B*T_e)) / (1 + exp(-hbar*omega_q/(k_B*T_e))).

``D`` is the pointer-separation rate, related to the mean readout photon
number by D = sqrt(2*kappa_c*n_c) / sqrt(1 + (kappa/(2*chi))^2) on a single
path, times the interference gain sqrt(2)*cos(theta_rt/2) on the
constructive port.  Setting dP_err/dt_m = 0 gives the closed-form optimum

    t_opt = T1/(x - 1) * W(2*x*(x - 1)/pi),     x = eta*D^2*T1,

with W the principal Lambert W branch; an interior optimum requires x > 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .cavity import CavityParams, Path
from .exceptions import InvalidParameterError, NoInteriorOptimumError
from .interference import enhancement_factor

__all__ = [
    "HBAR",
    "K_B",
    "ErrorModelParams",
    "ErrorBudget",
    "erf",
    "lambert_w0",
    "pointer_rate_from_photons",
    "p_measure",
    "p_relax",
    "p_thermal",
    "total_error",
    "optimal_time",
]

HBAR = 1.054571817e-34  # J*s
K_B = 1.380649e-23  # J/K

_BRANCH_POINT = -math.exp(-1.0)
# above this value of eta*D^2*T1 the closed form is well conditioned;
# below it (but above 1) a golden-section search is used instead
_NEAR_BOUNDARY = 1.0 + 1e-6


def erf(x: float) -> float:
    """Gauss error function (double precision)."""
    return math.erf(x)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function, w*exp(w) = x for x >= -1/e.

    An asymptotic/series initial guess is polished by Halley iterations.
    """
    if not math.isfinite(x):
        raise InvalidParameterError(f"argument must be finite, got {x!r}")
    if x < _BRANCH_POINT:
        raise InvalidParameterError(
            f"lambert_w0 requires x >= -1/e = {_BRANCH_POINT!r}, got {x!r}"
        )
    if x == 0.0:
        return 0.0
    if x > math.e:
        log_x = math.log(x)
        w = log_x - math.log(log_x)
    elif x > -0.25:
        w = x / (1.0 + x)
    else:
        # series around the branch point in p = sqrt(2*(e*x + 1))
        p = math.sqrt(2.0 * (math.e * x + 1.0))
        w = -1.0 + p * (1.0 - p * (1.0 / 3.0 - 11.0 / 72.0 * p))
        if w <= -1.0:
            return -1.0
    for _ in range(100):
        exp_w = math.exp(w)
        resid = w * exp_w - x
        denom = exp_w * (w + 1.0) - (w + 2.0) * resid / (2.0 * (w + 1.0))
        step = resid / denom
        w -= step
        if abs(step) <= 5e-16 * (1.0 + abs(w)):
            break
    return w


@dataclass(frozen=True)
class ErrorModelParams:
    """Everything the error budget depends on besides the measurement time."""

    eta: float
    n_c: float
    t1: float
    omega_q: float
    t_e: float
    cavity: CavityParams
    port: Path = Path.T
    theta_rt: float = 0.0
    include_thermal: bool = False

    def __post_init__(self):
        if not (0.0 < self.eta <= 1.0):
            raise InvalidParameterError(f"eta must lie in (0, 1], got {self.eta!r}")
        if not (math.isfinite(self.n_c) and self.n_c > 0.0):
            raise InvalidParameterError(f"n_c must be > 0, got {self.n_c!r}")
        if not (math.isfinite(self.t1) and self.t1 > 0.0):
            raise InvalidParameterError(f"T1 must be > 0, got {self.t1!r}")
        if not (math.isfinite(self.t_e) and self.t_e > 0.0):
            raise InvalidParameterError(f"T_e must be > 0, got {self.t_e!r}")
        if not math.isfinite(self.omega_q) or self.omega_q <= 0.0:
            raise InvalidParameterError(f"omega_q must be > 0, got {self.omega_q!r}")
        if Path(self.port) is Path.R:
            raise InvalidParameterError("the error model ports are T and PLUS")

    def pointer_rate(self) -> float:
        return pointer_rate_from_photons(self.cavity, self.n_c, self.port, self.theta_rt)


@dataclass(frozen=True)
class ErrorBudget:
    """Error contributions at one measurement time."""

    t_m: float
    p_m: float
    p_t1: float
    p_th: float
    total: float


def pointer_rate_from_photons(
    c: CavityParams, n_c: float, port: Path = Path.T, theta_rt: float = 0.0
) -> float:
    """Pointer-separation rate D (s^-1/2) at mean photon number ``n_c``.

    Both single paths carry the same rate; the constructive port scales it
    by the interference gain.
    """
    if n_c < 0.0:
        raise InvalidParameterError(f"n_c must be >= 0, got {n_c!r}")
    chi = c.require_chi()
    ratio = c.kappa / (2.0 * chi)
    d = math.sqrt(2.0 * c.kappa_c * n_c) / math.sqrt(1.0 + ratio * ratio)
    if Path(port) is Path.PLUS:
        d *= enhancement_factor(theta_rt)
    return d


def p_measure(eta: float, t_m: float, d_rate: float) -> float:
    """Gaussian-overlap measurement error 1 - erf(sqrt(eta*t_m)*D/sqrt(2)).

    Decreases monotonically in eta, t_m and D; underflows to exactly 0 for
    arguments beyond the erf double-precision saturation.
    """
    if t_m < 0.0:
        raise InvalidParameterError(f"t_m must be >= 0, got {t_m!r}")
    if not (0.0 < eta <= 1.0):
        raise InvalidParameterError(f"eta must lie in (0, 1], got {eta!r}")
    if d_rate < 0.0:
        raise InvalidParameterError(f"d_rate must be >= 0, got {d_rate!r}")
    return math.erfc(math.sqrt(eta * t_m) * d_rate / math.sqrt(2.0))


def p_relax(t_m: float, t1: float) -> float:
    """Relaxation error 1 - exp(-t_m/(2*T1))."""
    if t_m < 0.0:
        raise InvalidParameterError(f"t_m must be >= 0, got {t_m!r}")
    if t1 <= 0.0:
        raise InvalidParameterError(f"T1 must be > 0, got {t1!r}")
    return -math.expm1(-t_m / (2.0 * t1))


def p_thermal(omega_q: float, t_e: float) -> float:
    """Thermal-population error from the Boltzmann weight of the excited state."""
    if t_e <= 0.0:
        raise InvalidParameterError(f"T_e must be > 0, got {t_e!r}")
    if omega_q <= 0.0:
        raise InvalidParameterError(f"omega_q must be > 0, got {omega_q!r}")
    boltzmann = math.exp(-HBAR * omega_q / (K_B * t_e))
    return boltzmann / (1.0 + boltzmann)


def total_error(p: ErrorModelParams, t_m: float) -> ErrorBudget:
    """Error budget at measurement time ``t_m``.

    The thermal term is reported (and added) only when ``p.include_thermal``
    is set; the optimization below always runs on the two-term budget.
    """
    d = p.pointer_rate()
    p_m = p_measure(p.eta, t_m, d)
    p_t1 = p_relax(t_m, p.t1)
    p_th = p_thermal(p.omega_q, p.t_e) if p.include_thermal else 0.0
    return ErrorBudget(t_m=t_m, p_m=p_m, p_t1=p_t1, p_th=p_th, total=p_m + p_t1 + p_th)


_INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_section(f, lo: float, hi: float, rel_tol: float = 1e-12) -> float:
    a, b = lo, hi
    c = b - _INV_GOLDEN * (b - a)
    d = a + _INV_GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > rel_tol * (abs(a) + abs(b)):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_GOLDEN * (b - a)
            fd = f(d)
    return 0.5 * (a + b)


def optimal_time(p: ErrorModelParams) -> tuple[float, ErrorBudget]:
    """Measurement time minimizing the two-term error budget, plus the budget there.

    Requires eta*D^2*T1 > 1 (otherwise the measurement is too weak for an
    interior optimum and this raises).  Immediately above that boundary the
    closed form is ill conditioned and a golden-section search is used.
    """
    d = p.pointer_rate()
    x = p.eta * d * d * p.t1
    if x <= 1.0:
        raise NoInteriorOptimumError(
            f"eta*D^2*T1 = {x:.6g} <= 1: no interior optimum of the error budget"
        )
    if x <= _NEAR_BOUNDARY:
        t_opt = _golden_section(
            lambda t: total_error(p, t).total, 1e-6 * p.t1, 10.0 * p.t1
        )
    else:
        t_opt = p.t1 / (x - 1.0) * lambert_w0(2.0 * x * (x - 1.0) / math.pi)
    return t_opt, total_error(p, t_opt)
