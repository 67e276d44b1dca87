"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class ThetaAtlasError(Exception):
    """Base class for every error raised by theta_atlas."""


class DomainError(ThetaAtlasError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class BracketFailure(ThetaAtlasError):
    """Bracket endpoints do not separate signs of theta."""

    def __init__(self, message: str, q=None, k: int | None = None):
        super().__init__(message)
        self.q = q
        self.k = k


class ConvergenceFailure(ThetaAtlasError):
    """An iterative solver hit its iteration cap or lost conditioning."""


class DegreeOverflow(ThetaAtlasError):
    """The truncation degree required for the requested disk exceeds the cap."""


class CertificationFailure(ThetaAtlasError):
    """A zero (or the completeness of a zero set) could not be certified."""


class AmbiguousNearSpectral(ThetaAtlasError):
    """A pair count was requested too close to a spectral value to be decided."""


class SeedFailure(ThetaAtlasError):
    """A Newton seed left the admissible parameter range."""


class NoCrossing(ThetaAtlasError):
    """The v-bracket for an imaginary-axis solution does not straddle a crossing."""


class QuadratureFailure(ThetaAtlasError):
    """Quadrature error or tail estimate exceeded the budget."""


class PreconditionUnmet(ThetaAtlasError):
    """An operation's documented precondition does not hold for the inputs."""
