"""Exception and warning types raised across phasepad."""


class PhasepadError(Exception):
    """Base class for all phasepad errors."""


class InvalidFieldError(PhasepadError, ValueError):
    """A sampled field contains non-finite entries or has the wrong length."""


class ShapeError(PhasepadError, ValueError):
    """Two objects that must share a grid do not."""


class DomainError(PhasepadError, ValueError):
    """An argument lies outside the region where a routine is accurate."""


class TruncationError(PhasepadError, ValueError):
    """A grid is too narrow to hold the requested function."""


class AliasingError(PhasepadError, ValueError):
    """The requested momentum content exceeds the Nyquist limit of a grid."""


class RangeError(PhasepadError, ValueError):
    """Interpolation was requested outside the support of a grid."""


class SingularityError(PhasepadError, ZeroDivisionError):
    """A formula would divide by a (numerically) vanishing quantity."""


class ConsistencyError(PhasepadError, ArithmeticError):
    """A result violates an identity it must satisfy by construction."""


class PreconditionError(PhasepadError, ValueError):
    """An input does not satisfy the documented precondition of a routine."""


class UnsupportedDegreeError(PhasepadError, ValueError):
    """A polynomial symbol exceeds the supported total degree."""


class ConfigError(PhasepadError, ValueError):
    """A run or evolution configuration is invalid."""


class AccuracyWarning(UserWarning):
    """A result is computed but its accuracy guarantee does not hold."""


class TruncationWarning(AccuracyWarning):
    """A field carries non-negligible mass at the grid edges."""


class NormalizationWarning(AccuracyWarning):
    """An amplitude expected to have unit norm does not."""


class InconsistentAmplitudeWarning(AccuracyWarning):
    """A field is far from the subspace of valid amplitudes for a window."""
