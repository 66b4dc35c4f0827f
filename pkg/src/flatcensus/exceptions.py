"""
Custom exceptions for flatcensus.

This module provides specific exception classes for the different failure
modes of the census engine: bad configuration, invalid surfaces, broken
model assumptions and resource limits.

Every exception survives a round trip through pickle, so failures raised in
census worker processes reach the parent with their original type.
"""

from typing import Optional, Sequence


class FlatCensusError(Exception):
    """Base exception for all flatcensus errors."""
    pass


class ConfigurationError(FlatCensusError):
    """A run setting (argument, environment variable or file) is unusable.

    ``setting`` names the offending setting, e.g. ``FLATCENSUS_WORKERS`` or
    the subcommand that lacks an input file.
    """

    def __init__(self, message: str, setting: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.setting = setting

    def __reduce__(self):
        return type(self), (self.message, self.setting)

    def __str__(self) -> str:
        if self.setting:
            return f"{self.message} [{self.setting}]"
        return self.message


class MissingConfigurationError(ConfigurationError):
    """A subcommand is missing one of its inputs."""
    pass


class InvalidConfigurationError(ConfigurationError):
    """A run setting has a value outside its domain."""
    pass


class EnvironmentConfigurationError(ConfigurationError):
    """A FLATCENSUS_* environment variable cannot be parsed."""
    pass


class DomainError(FlatCensusError):
    """Raised when (g, n) or a formula parameter lies outside its domain."""

    def __init__(self, message: str, g: Optional[int] = None, n: Optional[int] = None):
        self.message = message
        self.g = g
        self.n = n
        super().__init__(self.message)

    def __reduce__(self):
        return type(self), (self.message, self.g, self.n)


class InvalidTableError(FlatCensusError):
    """Raised when a gluing table violates the matching rules."""

    def __init__(self, message: str, violations: Sequence = ()):
        self.message = message
        self.violations = tuple(violations)
        super().__init__(self.message)

    def __reduce__(self):
        return type(self), (self.message, self.violations)


class DisconnectedTableError(FlatCensusError):
    """Raised when an operation needs a connected surface."""
    pass


class AnnulusValidationError(FlatCensusError):
    """Raised when merged rows do not form an annulus."""

    def __init__(self, message: str, direction: Optional[str] = None):
        self.message = message
        self.direction = direction
        super().__init__(self.message)

    def __reduce__(self):
        return type(self), (self.message, self.direction)


class CurveSystemError(FlatCensusError):
    """Raised when a curve system is not a core multi-curve of the surface."""
    pass


class DanglingBoundaryError(FlatCensusError):
    """Raised when a cut curve does not produce exactly two boundary circles."""

    def __init__(self, curve: int, circles: int):
        self.curve = curve
        self.circles = circles
        super().__init__(f"Curve {curve} has {circles} boundary circles, expected 2")

    def __reduce__(self):
        return type(self), (self.curve, self.circles)


class NormalizationError(FlatCensusError):
    """Raised when an unmarked annulus vertex carries a loop."""

    def __init__(self, vertex: int):
        self.vertex = vertex
        super().__init__(f"Unmarked annulus vertex {vertex} carries a loop")

    def __reduce__(self):
        return type(self), (self.vertex,)


class ResourceLimitExceeded(FlatCensusError):
    """Raised when an enumeration examines more tables than allowed."""

    def __init__(self, limit: int, examined: int):
        self.limit = limit
        self.examined = examined
        super().__init__(f"Resource limit exceeded: examined {examined} tables (limit {limit})")

    def __reduce__(self):
        return type(self), (self.limit, self.examined)


class CensusIncompleteError(FlatCensusError):
    """Raised when a census value is requested beyond the completed area."""

    def __init__(self, requested: int, available: int):
        self.requested = requested
        self.available = available
        super().__init__(f"Census complete up to area {available}, requested L={requested}")

    def __reduce__(self):
        return type(self), (self.requested, self.available)


class CheckpointError(FlatCensusError):
    """Raised when a shard checkpoint cannot be read or written."""

    def __init__(self, message: str, path: Optional[str] = None):
        self.message = message
        self.path = path
        super().__init__(self.message)

    def __reduce__(self):
        return type(self), (self.message, self.path)


class InvalidPantsError(FlatCensusError):
    """Raised when a pants decomposition description is inconsistent."""

    def __init__(self, message: str, g: Optional[int] = None, n: Optional[int] = None):
        self.message = message
        self.g = g
        self.n = n
        super().__init__(self.message)

    def __reduce__(self):
        return type(self), (self.message, self.g, self.n)
