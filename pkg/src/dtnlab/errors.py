"""Exception types shared across the package."""


class DtnLabError(Exception):
    """Base class for all package errors."""


class GeometryError(DtnLabError):
    """Invalid or degenerate boundary-curve geometry."""


class GridError(DtnLabError):
    """Bulk grid construction failure (disconnected interior, degenerate cut)."""


class SpecError(DtnLabError):
    """Invalid operator specification (ellipticity violation, bad control set)."""


class SolverError(DtnLabError):
    """Linear or policy-iteration solve failure."""


class InputError(DtnLabError):
    """Out-of-range or inconsistent input to an operation."""


class ResolutionError(DtnLabError):
    """Requested quantity is below the resolving power of the current grids."""


class ConfigError(DtnLabError):
    """Run configuration failed validation; message names the offending key."""
