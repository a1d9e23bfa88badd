"""Error taxonomy shared across the package.

Callers can distinguish bad coordinates (DomainError), malformed or
out-of-range family parameters (SpecValidationError), operations that a
family simply does not support (UnsupportedSpecError), resource limits
(CapacityError), and violated mathematical preconditions
(PreconditionError). CLI usage problems map to UsageError and exit code 2.
"""


class GraphonLabError(Exception):
    """Base class for all package errors."""


class DomainError(GraphonLabError, ValueError):
    """A coordinate or index lies outside its admissible range."""


class SpecValidationError(GraphonLabError, ValueError):
    """A graphon spec is malformed or has out-of-range parameters."""


class UnsupportedSpecError(GraphonLabError, ValueError):
    """The requested operation is not defined for this graphon family."""


class CapacityError(GraphonLabError, RuntimeError):
    """A size cap (vertex count, enumeration work) would be exceeded."""


class PreconditionError(GraphonLabError, ValueError):
    """A documented mathematical precondition does not hold."""


class UsageError(GraphonLabError, ValueError):
    """Bad command line or config file input."""
