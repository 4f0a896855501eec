# capwave_core/errors.py
"""Exception and warning types shared by the library and the CLI."""

from typing import List, Tuple, Type

# --- Exit codes used by the CLI ---
EXIT_OK = 0
EXIT_INVALID_INPUT = 1
EXIT_REGIME_UNSUPPORTED = 2
EXIT_NUMERICAL_FAILURE = 3


class CapwaveError(Exception):
    """Base class for every error raised by capwave_core."""


class DomainError(CapwaveError, ValueError):
    """An argument lies outside the domain where the formula is defined."""


class ConfigurationError(CapwaveError, ValueError):
    """A run configuration is incomplete or inconsistent."""


class WrongCaseError(CapwaveError, ValueError):
    """A closed form for one current regime was asked for with the other regime's parameters."""


class OutOfRangeError(CapwaveError, ValueError):
    """A requested time lies outside the span covered by a trajectory or bridge."""


class RegimeUnsupportedError(CapwaveError, RuntimeError):
    """No closed form is available for these constants; use the numerical path."""


class UnsupportedInitialDataError(RegimeUnsupportedError):
    """Initial data cannot be fitted to the parametric solution."""


class NumericalFailureError(CapwaveError, RuntimeError):
    """The integrator or a quadrature failed to reach the requested accuracy."""


class StripExitWarning(UserWarning):
    """A particle left the fluid strip 0 <= z <= 1 where the linear field is physical."""


class TruncationWarning(UserWarning):
    """An exact trajectory was cut short before the end of the requested window."""


def exit_code_for(exc: BaseException) -> int:
    """Maps a library exception to the CLI exit-code contract."""
    table: List[Tuple[Type[BaseException], int]] = [
        (RegimeUnsupportedError, EXIT_REGIME_UNSUPPORTED),
        (NumericalFailureError, EXIT_NUMERICAL_FAILURE),
        (OSError, EXIT_NUMERICAL_FAILURE),
        (ValueError, EXIT_INVALID_INPUT),
    ]
    for exc_type, code in table:
        if isinstance(exc, exc_type):
            return code
    return EXIT_INVALID_INPUT
