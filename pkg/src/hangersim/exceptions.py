"""Exception and warning types raised by hangersim."""


class HangersimError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(HangersimError, ValueError):
    """A physical parameter or argument violates its documented constraints."""


class ZeroChiError(InvalidParameterError):
    """Pointer-state separation requested with a vanishing dispersive shift."""


class GridError(InvalidParameterError):
    """A sweep grid is empty, too short, or not strictly increasing."""


class GridMismatchError(InvalidParameterError):
    """Spectra that must share one frequency grid do not."""


class NonFiniteInputError(InvalidParameterError):
    """An amplitude argument contains NaN or Inf."""


class InconsistentPairError(HangersimError):
    """Transmission/reflection pointer pairs do not belong to the same drive."""


class DegenerateRecordError(HangersimError):
    """A calibration record cannot be inverted (division by zero or invalid
    square-root argument in the amplitude reconstruction)."""


class InconsistentDataError(HangersimError):
    """Calibration data violates the unit-modulus consistency check."""


class InconsistentDataWarning(UserWarning):
    """Calibration data is noticeably, but not fatally, inconsistent."""


class RankDeficiencyError(HangersimError):
    """The chain-gain fit matrix is rank deficient (collinear spectra)."""


class FitConvergenceError(HangersimError):
    """An iterative fit exhausted its iteration budget."""


class NoInteriorOptimumError(HangersimError):
    """The error budget has no interior minimum (measurement too weak)."""


class ConfigError(HangersimError):
    """An experiment configuration failed validation."""
