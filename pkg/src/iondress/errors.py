"""Shared exception types for the simulator."""


class SimulationError(Exception):
    """Base class for simulator-specific failures."""


class ConfigError(SimulationError):
    """Invalid or contradictory run configuration."""


class DegeneratePulseError(SimulationError):
    """Pulse parameters describe a zero-duration (no-field) pulse."""


class GridTooCoarseError(SimulationError):
    """Time grid cannot resolve the requested dynamics."""


class CausticError(SimulationError):
    """Stationary-phase weight diverges at a stationary point."""
