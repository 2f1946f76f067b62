"""Exception types raised across the package."""


class SgdgError(Exception):
    """Base class for all package errors."""


class AdmissibilityError(SgdgError):
    """A state left the admissible set (rho > 0, Gamma > 0, Pi >= 0, rho e > p_inf)."""


class ConfigError(SgdgError):
    """Invalid user input: case description, parameters or files."""


class MeshError(SgdgError):
    """Invalid mesh geometry or connectivity."""


class DomainError(SgdgError):
    """A function was evaluated outside of its mathematical domain."""


class InterlacingError(SgdgError):
    """HLLC signal speeds are not ordered as sL < s* < sR."""


class VacuumError(SgdgError):
    """Riemann data generate a vacuum region."""


class StepError(SgdgError):
    """A time step produced inadmissible cell averages or violated its CFL bound."""


class LimiterError(SgdgError):
    """A cell average violates the bounds the limiter is supposed to enforce."""
