"""Exception hierarchy shared by every rmra module.

The CLI maps these onto exit codes: validation errors are 1, numerical
failures are 2, verification failures are 3.
"""


class RmraError(Exception):
    """Base class for all rmra errors."""


class ValidationError(RmraError):
    """Bad input: shapes, schemas, configuration, or broken type invariants."""


class NumericalError(RmraError):
    """Numerical failure: lost positive-definiteness, conditioning, domain
    errors of spectral functions, or a non-converging eigensolver."""


class VerificationError(RmraError):
    """An oracle check did not meet its stated budget."""
