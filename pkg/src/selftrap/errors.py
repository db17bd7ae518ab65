"""Exception hierarchy for the selftrap package."""


class SelfTrapError(Exception):
    """Base class for all selftrap errors."""


class ParameterError(SelfTrapError, ValueError):
    """Invalid argument or configuration value."""


class GridSizeError(ParameterError):
    """Grid has too few points for the requested operation."""


class DomainError(SelfTrapError, ValueError):
    """Field values violate a domain requirement (sign, finiteness)."""


class NormalizationError(SelfTrapError, ValueError):
    """Density is not normalized to within the required tolerance."""


class ResolutionError(ParameterError):
    """Grid does not resolve the shortest wavelength of the input."""


class DegenerateInputError(SelfTrapError, ValueError):
    """Input is degenerate for the requested operation (e.g. amplitude
    below floor almost everywhere)."""


class SolverError(SelfTrapError, RuntimeError):
    """ODE or scheme failure; carries diagnostics for error reports."""

    def __init__(self, message: str, diagnostics: dict | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
