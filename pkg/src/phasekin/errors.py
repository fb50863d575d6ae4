"""Exception types shared across the package."""


class PhasekinError(Exception):
    """Base class for all phasekin errors."""


class DecayGuardError(PhasekinError):
    """A field that must vanish at the box boundary does not.

    Periodic spectral methods silently alias non-decaying content; this
    guard turns that into a diagnosable failure.
    """


class GridMismatchError(PhasekinError):
    """Two objects that must share a grid were built on different grids."""


class NormalizationError(PhasekinError):
    """A distribution's quadrature integral is off its required value."""


class NonConvergenceError(PhasekinError):
    """A truncated derivative series hit its cap while terms were still large."""


class ImaginaryResidueError(PhasekinError):
    """A nominally real result carries a non-negligible imaginary part."""


class SignedDensityError(PhasekinError):
    """A joint distribution with negative lobes admits no sampling interpretation."""


class InsufficientSupportError(PhasekinError):
    """Too few lattice points support a requested fit."""


class DegenerateFitError(PhasekinError):
    """A regression input is degenerate (e.g. a norm underflowed)."""


class ConfigError(PhasekinError):
    """Scenario configuration is invalid; message carries the field path."""
