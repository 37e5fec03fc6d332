"""Exception and warning types shared across the package."""


class FluxlineError(Exception):
    """Base class for all package-specific errors."""


class GeometryError(FluxlineError):
    """Raised for physically invalid device geometry (overlapping sectors etc.)."""


class UnsupportedLayoutError(FluxlineError):
    """Raised when an operation only defined for a specific layout is misapplied."""


class RootNotFoundError(FluxlineError):
    """Mode search failed; carries the scan trace for diagnosis.

    Attributes:
        scan_trace: list of (j1, det_sign, log_abs_det) triples from the last scan.
    """

    def __init__(self, message, scan_trace=None):
        super().__init__(message)
        self.scan_trace = scan_trace or []


class OracleConvergenceError(FluxlineError):
    """Finite-difference eigensolver failure; carries grid metadata."""

    def __init__(self, message, grid_info=None):
        super().__init__(message)
        self.grid_info = grid_info or {}


class ConfigError(FluxlineError):
    """Raised for malformed or inconsistent configuration input."""


class DegenerateModeWarning(UserWarning):
    """Emitted when a mode is located by minimizing the singular value
    because the determinant does not change sign (suspected double root)."""


class DispersiveLimitWarning(UserWarning):
    """Emitted when a perturbative formula is evaluated outside its regime."""
