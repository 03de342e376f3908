"""Exception hierarchy shared by the library and the CLI."""


class FaultySearchError(Exception):
    """Base class for every error raised by this package."""


class DomainError(FaultySearchError, ValueError):
    """An argument lies outside the domain where a formula is defined."""


class DivergenceError(DomainError):
    """The expected-time series does not converge (growth >= 1/(1-p)^2)."""


class TurningPointError(DomainError):
    """A placement coincides with a turning point of the trajectory."""


class SingularMatrixError(FaultySearchError):
    def __init__(self, pivot_index, pivot=0.0):
        super().__init__(f"singular matrix: pivot {pivot!r} at index {pivot_index}")
        self.pivot_index = pivot_index
        self.pivot = pivot


class ResidualError(FaultySearchError):
    """A computed solution fails its residual check."""


class ConvergenceError(FaultySearchError):
    """An iterative evaluation did not settle before its budget ran out."""


class NoRootError(FaultySearchError):
    """No qualifying root was found in the search range."""


class InfeasiblePairError(FaultySearchError):
    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = tuple(failed)


class CensoredError(FaultySearchError):
    def __init__(self, censored, max_crossings):
        super().__init__(
            f"{censored} trial(s) undetected after {max_crossings} crossings")
        self.censored = censored
        self.max_crossings = max_crossings
