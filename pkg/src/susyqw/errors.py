"""Exception types raised by the simulator and analysis routines."""


class SusyqwError(Exception):
    """Base class for all package errors."""


class LatticeMismatchError(SusyqwError):
    """State and coin profile live on different lattices."""


class BoundaryReachedError(SusyqwError):
    """Walker amplitude reached the edge of a bounded segment."""


class ProfileError(SusyqwError):
    """Invalid coin-profile descriptor (odd ring, bad interface site, ...)."""


class SymmetryViolationError(SusyqwError):
    """State violates the bulk symmetry constraints (torus radius off 1)."""


class PhaseTransitionError(SusyqwError):
    """Winding numbers requested at (or too close to) a gap closing."""


class UnoccupiedSiteError(SusyqwError):
    """Per-site quantity requested at a site with negligible occupation."""


class ConfigError(SusyqwError):
    """Invalid run configuration (unknown key, bad value, missing field)."""
