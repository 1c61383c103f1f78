"""Exception hierarchy shared by every module of the package."""


class LefschetzLabError(Exception):
    """Base class for all errors raised by lefschetz_lab."""


class MalformedInputError(LefschetzLabError, ValueError):
    """Input that cannot be interpreted (bad entries, bad files, bad text)."""


class FieldMismatchError(MalformedInputError):
    """Two operands live over different coefficient fields."""


class DegreeError(LefschetzLabError, ValueError):
    """A degree precondition was violated."""


class PresentationError(LefschetzLabError, ValueError):
    """The generators of an instance do not form a valid presentation."""


class UnsupportedError(LefschetzLabError):
    """The operation is not defined for this input (e.g. non-regular algebra)."""
