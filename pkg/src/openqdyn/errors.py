"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: configuration problems exit
with 2, numerical failures with 3, and resource exhaustion with 4.
"""


class OpenQDynError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(OpenQDynError):
    """Invalid configuration, domain violation detected before computing."""


class NumericalError(OpenQDynError):
    """A numerical procedure failed to reach its configured tolerance.

    ``achieved_error`` carries the best error estimate available when the
    failure was detected (may be None).
    """

    def __init__(self, message, achieved_error=None):
        super().__init__(message)
        self.achieved_error = achieved_error


class ResourceError(OpenQDynError):
    """A resource cap (e.g. bond dimension) conflicts with the accuracy target.

    ``partial_trajectory`` holds whatever trajectory data was computed before
    the conflict, when the failing operation can provide it.
    """

    def __init__(self, message, partial_trajectory=None):
        super().__init__(message)
        self.partial_trajectory = partial_trajectory


class FitError(NumericalError):
    """Nonlinear fit did not converge or its Jacobian is singular."""


class ScanBracketError(ConfigError):
    """The supplied coupling range does not bracket the detection boundary."""
