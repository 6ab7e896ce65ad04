"""Exception types shared across the package."""


class LLGSError(Exception):
    """Base class for all package-specific errors."""


class SouthPoleError(LLGSError):
    """Stereographic projection hit the south pole (m3 <= -1)."""

    def __init__(self, index):
        self.index = index
        super().__init__(
            f"stereographic projection undefined at grid index {index} (m3 <= -1)"
        )


class DegenerateFamilyError(LLGSError):
    """mu = k^2 together with h = beta/alpha: theta is unspecified."""


class ZeroAmplitudeError(LLGSError):
    """Operation requires a wavetrain with r > 0."""


class PoleSingularityError(LLGSError):
    """Coherent-structure ODE evaluated too close to sin(theta) = 0.

    Use the desingularized system instead.
    """


class CommensurabilityError(LLGSError):
    """Wavenumber does not fit the periodic domain (k*L not a multiple of 2*pi)."""


class CFLError(LLGSError):
    """Explicit time step violates the diffusive stability bound."""


class BlowupError(LLGSError):
    """NaN detected during time stepping.

    Either genuine finite-time blow-up or under-resolution; the two cannot be
    distinguished numerically.
    """


class ConfigError(LLGSError):
    """Malformed run configuration."""
