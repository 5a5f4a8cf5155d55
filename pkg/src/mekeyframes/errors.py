"""Exception hierarchy.

Everything caused by bad input derives from :class:`InputError` (CLI exit
code 1); broken internal guarantees raise :class:`InvariantViolation`
(exit code 2).
"""


class KeyframeError(Exception):
    """Base class for all package errors."""


class InputError(KeyframeError, ValueError):
    pass


class InvariantViolation(KeyframeError, AssertionError):
    pass


class OutOfRange(InputError):
    pass


class OrderViolation(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class InvalidLambda(InputError):
    pass


class InvalidFps(InputError):
    pass


class InvalidFrame(InputError):
    pass


class EmptyCandidateSet(InvariantViolation):
    pass


class UnknownClass(InputError):
    pass


class EmptyMatrix(InputError):
    pass


class SingleSubject(InputError):
    pass


class SpecInvalid(InputError):
    pass


class InfeasibleJitter(InputError):
    pass


class ParseError(InputError):
    pass


class MissingFrames(InputError):
    pass


class InvalidAnnotation(InputError):
    pass


class UnsupportedFormat(InputError):
    pass


class CorruptHeader(InputError):
    pass


class TruncatedPixels(InputError):
    pass


class SampleError(InputError):
    """A per-sample failure during a corpus-level run; carries the sample id."""

    def __init__(self, sample_id: str, cause: Exception):
        super().__init__(f"sample {sample_id!r}: {cause}")
        self.sample_id = sample_id
        self.cause = cause
