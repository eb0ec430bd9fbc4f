"""Exception hierarchy shared across the package."""


class ComplexError(ValueError):
    """Base class for malformed complexes, weights and cochains."""


class DimensionMismatchError(ComplexError):
    pass


class DomainError(ComplexError):
    """A weight or parameter lies outside its admissible range."""


class DuplicateFaceError(ComplexError):
    pass


class PurityError(ComplexError):
    pass


class MissingFaceError(ComplexError, KeyError):
    def __str__(self) -> str:  # KeyError would repr() the message
        return ValueError.__str__(self)


class DimensionError(ComplexError):
    """A dimension index is outside the range an operation supports."""


class EmptyLinkError(ComplexError):
    pass


class NotInC0Error(ComplexError):
    pass


class UndefinedRatioError(ComplexError, ZeroDivisionError):
    pass


class GenerationError(RuntimeError):
    """A random generator exhausted its retry budget."""


class MixingBoundViolation(AssertionError):
    """A proven mixing bound failed numerically; indicates a bug, not a counterexample."""


class FormatError(ComplexError):
    """An input document is malformed; the message names the line or field."""
