"""Exception types shared across the package."""


class MtloadError(Exception):
    """Base class for package-specific errors."""


class ConfigError(MtloadError):
    """Invalid configuration input: unknown key, bad value, or unsupported unit."""


class UntrappedCloudError(MtloadError):
    """Gravity overwhelms the magnetic confinement; the thermal density
    profile is not normalizable and no finite volume exists."""


class IntegrationError(MtloadError):
    """The ODE integrator could not reach the requested time."""


class FitNotConvergedError(MtloadError):
    """An iterative fit exhausted its iteration budget.

    The best iterate seen so far is attached as ``best`` (a FitResult with
    ``converged == False``).
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best


class GravityAxisError(MtloadError):
    """A density-image fit converged to a non-positive sag parameter,
    which normally means the image's vertical axis is mislabeled or
    flipped."""
