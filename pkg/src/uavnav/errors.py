"""Exception types shared across the package."""


class UavNavError(Exception):
    """Base class for all package errors."""


class ShapeError(UavNavError):
    """Array dimensions do not match what an operation requires."""


class UnsatisfiableWorldError(UavNavError):
    """Rejection sampling could not place a point outside the obstacles."""


class TrainingDivergenceError(UavNavError):
    """A loss or gradient became non-finite during training."""


class CorruptCheckpointError(UavNavError):
    """A checkpoint file is truncated, has a bad magic string, or a bad version."""


class CheckpointIncompatibleError(UavNavError):
    """A checkpoint's architecture does not match the requested configuration."""


class ConfigError(UavNavError):
    """A run configuration file is missing, malformed, or has unknown keys."""


class EpisodeDoneError(UavNavError):
    """step() was called on an episode that already finished."""
