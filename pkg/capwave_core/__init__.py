# capwave_core/__init__.py
"""Particle paths beneath linear capillary-gravity waves."""

from .config import __version__, RunConfig, TOLERANCES
from .errors import (
    CapwaveError, ConfigurationError, DomainError, NumericalFailureError, OutOfRangeError,
    RegimeUnsupportedError, StripExitWarning, TruncationWarning, UnsupportedInitialDataError, WrongCaseError,
)
from .wave_model import DimensionalParameters, WaveParameters, dispersion_speed, field_sample
from .particle_dynamics import ParticleState, Trajectory, integrate
from .exact_case_equal import trajectory_case1
from .exact_case_general import trajectory_case2
