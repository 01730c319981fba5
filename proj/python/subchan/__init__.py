"""Sub-channel selection statistics and random-matrix capacity."""

from ._core import *  # noqa: F401,F403
from ._core import ParameterError, DomainError, ConvergenceError, UnsupportedModeError  # noqa: F401

__version__ = "0.1.0"
