"""Exception hierarchy.

Three families matter to callers: bad input (ValidationError and
subclasses), physically infeasible configurations, and numeric failures.
The CLI maps them to exit codes 1, 2 and 3 respectively.
"""


class QkdLimitError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(QkdLimitError, ValueError):
    """Input violates a documented precondition."""


class InconsistentQberError(ValidationError):
    """Observed QBER set cannot come from any Pauli channel."""


class UndefinedQberError(ValidationError):
    """QBER is 0/0 for these inputs (no detections at all)."""


class InfeasibleConfigurationError(QkdLimitError):
    """Hardware cannot reach the security threshold at any distance."""


class NumericError(QkdLimitError):
    """A numeric routine failed to converge or lost consistency."""


class BracketError(NumericError):
    """Root-finding interval is degenerate or not evaluable."""


class NonMonotonicModelError(NumericError):
    """Transmissivity model is not monotone on the sampled interval."""
