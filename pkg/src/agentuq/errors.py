"""Exception hierarchy shared across the package.

Every error raised by the library derives from AgentUQError so callers (and
the CLI) can map failures onto stable exit codes.
"""

from __future__ import annotations


class AgentUQError(Exception):
    """Base class for all library errors."""


class ValidationError(AgentUQError):
    """A value object or system definition violates an invariant."""


class StructuralError(AgentUQError):
    """A trajectory is inconsistent with the system that allegedly produced it."""


class ConfigurationError(AgentUQError):
    """A required piece of configuration (taxonomy, rule, partition) is missing."""


class ParameterError(AgentUQError):
    """A numeric parameter lies outside its admissible domain."""


class SchemaError(AgentUQError):
    """A scenario file does not conform to the documented schema.

    ``field`` holds a dotted/indexed path such as ``action_kernel[3].dist``.
    """

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class UsageError(AgentUQError):
    """An operation was invoked on inputs outside its contract (e.g. wrong horizon)."""


class EnumerationCapError(AgentUQError):
    """Refusal to enumerate because the estimated trajectory count exceeds the cap."""

    def __init__(self, estimate: int, cap: int):
        self.estimate = estimate
        self.cap = cap
        super().__init__(
            f"estimated trajectory count {estimate} exceeds enumeration cap {cap}"
        )
