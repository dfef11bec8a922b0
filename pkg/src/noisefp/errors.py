"""Exception taxonomy shared across the package.

Three categories, mirrored by the CLI exit codes: bad arguments or violated
preconditions, malformed persisted files, and numerical invariant failures.
"""


class NoiseFpError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(NoiseFpError, ValueError):
    """An argument or operation precondition was violated."""


class DataFormatError(NoiseFpError, ValueError):
    """A persisted file failed to parse or validate."""


class NumericError(NoiseFpError, ArithmeticError):
    """A numerical invariant (normalization, positivity, finiteness) failed."""
