"""Exception types raised by the simulator."""

from typing import List, Optional


class SimulationError(Exception):
    """Base class for simulator errors."""


class MissingEntityError(SimulationError, KeyError):
    """A control or query referenced an entity id the world does not hold."""


class InvalidControlError(SimulationError, ValueError):
    """A control command was non-finite or targeted a static entity."""


class InvalidArgumentError(SimulationError, ValueError):
    """An argument was outside its valid domain."""


class NoPathError(SimulationError):
    """The goal node cannot be reached from the start node."""


class TrackingLostError(SimulationError):
    """A car drifted beyond the recovery distance of its path."""


class InvalidSeverityError(SimulationError, ValueError):
    """A severity value does not define a finite positive decay constant."""


class NoPixelsError(SimulationError, ValueError):
    """A footprint selected no pixels."""


class ShapeError(SimulationError, ValueError):
    """Network inputs do not match the configured input shape."""


class TrainingDivergedError(SimulationError, RuntimeError):
    """The training loss became non-finite."""


class ConfigError(SimulationError, ValueError):
    """Configuration file or scenario configuration is invalid."""


class CheckpointError(SimulationError, ValueError):
    """A checkpoint does not match the expected version or architecture."""


class CalibrationError(SimulationError):
    """A solo calibration run did not produce the expected outcome."""

    def __init__(self, message: str, transcript: Optional[List[str]] = None):
        super().__init__(message)
        self.transcript = list(transcript or [])

    def __str__(self) -> str:
        base = super().__str__()
        if not self.transcript:
            return base
        return base + "\n" + "\n".join(f"  {line}" for line in self.transcript)
