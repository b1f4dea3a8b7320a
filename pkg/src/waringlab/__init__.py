"""Numerical experiments on sums of two squares and s biquadrates (s = 3, 4)."""

__version__ = "0.1.0"

from .errors import CapacityError, InsufficientDataError, IntegrityError, NonStabilizationError, WlabError  # noqa: E402
from .kernels import BACKEND  # noqa: E402

__all__ = [
    "BACKEND",
    "CapacityError",
    "InsufficientDataError",
    "IntegrityError",
    "NonStabilizationError",
    "WlabError",
    "__version__",
]
