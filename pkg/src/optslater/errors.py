"""Exception types raised across the package."""


class OptSlaterError(Exception):
    """Base class for all errors raised by optslater."""


class ZeroState(OptSlaterError, ValueError):
    pass


class ShapeMismatch(OptSlaterError, ValueError):
    pass


class BadShape(OptSlaterError, ValueError):
    pass


class WrongShape(OptSlaterError, ValueError):
    pass


class NotOrthonormal(OptSlaterError, ValueError):
    pass


class NotUnitary(OptSlaterError, ValueError):
    pass


class NotHermitian(OptSlaterError, ValueError):
    pass


class NotNormalized(OptSlaterError, ValueError):
    pass


class BadRank(OptSlaterError, ValueError):
    pass


class TooLarge(OptSlaterError, ValueError):
    pass


class NotCertain(OptSlaterError, ValueError):
    pass


class NotSimultaneous(OptSlaterError, ValueError):
    pass


class NotOptimal(OptSlaterError, ValueError):
    pass


class NotPaired(OptSlaterError, ValueError):
    pass


class UnknownName(OptSlaterError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown name"


class ParseError(OptSlaterError, ValueError):
    """Malformed state file. ``lineno`` is 1-based, or None for file-level problems."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class NoConvergence(UserWarning):
    """Emitted (as a warning) when an optimizer hits its iteration cap."""
