"""
Exception hierarchy of the estimation pipeline.

Every class derives from the builtin normally raised for the same situation, so code
that catches ``ValueError`` or ``RuntimeError`` keeps working. ``exit_code`` is the
process exit status used by the command-line front-end.
"""


class KostkaVolError(Exception):
    """Base class of all pipeline errors."""

    exit_code = 1
    status = "error"


class InstanceParseError(KostkaVolError, ValueError):
    """Malformed instance or configuration file."""

    exit_code = 2
    status = "parse-error"

    def __init__(self, message, line=None, column=None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
        self.line = line
        self.column = column


class InputError(KostkaVolError, ValueError):
    exit_code = 2
    status = "input-error"


class PreconditionError(KostkaVolError, ValueError):
    exit_code = 2
    status = "precondition"


class DegenerateInstanceError(KostkaVolError, ValueError):
    """lambda has repeated parts, so the Kostka polytope has volume 0."""

    exit_code = 3
    status = "degenerate"


class BoundaryInstanceError(KostkaVolError, ValueError):
    """mu lies on the boundary of the permutohedron (epsilon = 0)."""

    exit_code = 4
    status = "boundary"


class ResourceLimitError(KostkaVolError, RuntimeError):
    exit_code = 5
    status = "resource"

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class IndeterminateError(ResourceLimitError):
    """A certified comparison could not be decided below the precision cap."""


class ConditioningError(KostkaVolError, RuntimeError):
    exit_code = 5
    status = "resource"


class CertificationFailure(KostkaVolError, RuntimeError):
    exit_code = 6
    status = "certify-fail"
