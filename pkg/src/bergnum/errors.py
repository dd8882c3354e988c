"""Exception types shared across the toolkit.

Every numerical failure mode carries enough context to be surfaced verbatim
by the service layer and the CLI (which maps them to exit code 1, or 2 for
inconclusive/partial results).
"""

from __future__ import annotations


class BergnumError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(BergnumError):
    """Invalid configuration or malformed input description."""


class QuadratureError(BergnumError):
    """Quadrature failed to reach the requested tolerance.

    Carries the best value obtained and the achieved error estimate so the
    caller can decide whether the partial result is usable.
    """

    def __init__(self, message: str, value: float | complex | None = None,
                 achieved: float | None = None):
        super().__init__(message)
        self.value = value
        self.achieved = achieved


class TruncationError(BergnumError):
    """A certified series truncation could not be produced.

    ``partial`` holds whatever partial sum / coefficient data was computed,
    ``bound`` the best tail bound available.
    """

    def __init__(self, message: str, partial=None, bound: float | None = None):
        super().__init__(message)
        self.partial = partial
        self.bound = bound


class DegenerateDiscError(BergnumError):
    """A hyperbolic disc carries zero weighted mass.

    This is a genuine feature of weights with boundary-reaching support gaps,
    not a numerical accident, so it is reported with the offending centre and
    radius.
    """

    def __init__(self, center: complex, radius: float):
        super().__init__(
            f"weighted mass of the hyperbolic disc at z={center} with radius "
            f"{radius} is zero; local means are undefined there"
        )
        self.center = center
        self.radius = radius


class ConstructionError(BergnumError):
    """A derived object (weight, sequence, lattice) cannot be built."""
