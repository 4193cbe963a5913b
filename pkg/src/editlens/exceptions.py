"""Exception hierarchy.

``InputError`` subclasses signal bad user input (CLI exit code 2); anything
else escaping a command is treated as an internal failure (exit code 1).
"""


class EditLensError(Exception):
    """Base class for all errors raised by this package."""


class InputError(EditLensError, ValueError):
    """The caller supplied data that cannot be processed."""


class InvariantViolation(EditLensError, AssertionError):
    """An internal consistency check failed."""


class InvalidOperation(InputError):
    """An edit operation was constructed with inconsistent fields."""


class SpanOutOfBounds(InputError):
    pass


class ReplayMismatch(InputError):
    pass


class EmptyReferenceSet(InputError):
    pass


class ZeroDenominator(InputError):
    """The score is undefined because its denominator is zero."""


class LogReplayMismatch(InputError):
    pass


class InputMismatch(InputError):
    pass


class SelectorOutOfRange(InputError):
    pass


class EmptySequenceUnderDeletion(InputError):
    pass


class InvalidTable(InputError):
    pass


class EmptyCorpus(InputError):
    pass


class CorpusMismatch(InputError):
    pass
