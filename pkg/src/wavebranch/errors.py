"""Exception and warning classes raised by the toolkit."""


class WaveBranchError(Exception):
    """Base class for all numerical failures reported by the toolkit."""


class DomainError(WaveBranchError, ValueError):
    """Argument lies outside the domain of the operation."""


class SingularInputError(WaveBranchError, ValueError):
    """Surface shear at or below the critical value ``s0``."""


class NoSolutionError(WaveBranchError):
    """The requested equation has no root (e.g. R below R_c)."""


class BracketError(WaveBranchError):
    """A root bracket could not be established."""


class ShootingDegeneracyError(WaveBranchError):
    """The shooting IVP hits a resonant vertical mode."""


class DiscretizationError(WaveBranchError):
    """Grid refinement check failed."""


class NearResonanceError(WaveBranchError):
    """Linear problem solved at (or too close to) a kernel wavenumber."""


class StagnationError(WaveBranchError):
    """Vertical velocity at the surface is numerically zero."""


class HodographBreakdownError(WaveBranchError):
    """The hodograph map lost monotonicity (h_p <= 0)."""


class NonConvergenceError(WaveBranchError):
    """Newton iteration did not converge."""


class AccuracyWarning(UserWarning):
    """Result computed, but close to a singular configuration."""


class TruncationWarning(UserWarning):
    """Truncated domain too short for the computed eigenvector."""


class ConfigError(ValueError):
    """Run configuration failed to parse or validate."""
