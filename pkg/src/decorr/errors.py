"""Exception hierarchy.

Input problems derive from :class:`InputError` (CLI exit code 2), numeric
failures from :class:`NumericError` (CLI exit code 3).
"""


class DecorrError(Exception):
    """Base class for every error raised by this package."""


class InputError(DecorrError, ValueError):
    """Invalid user input or inconsistent arguments."""


class NumericError(DecorrError, ArithmeticError):
    """A computation produced a result that cannot be trusted."""


class EmptySequence(InputError):
    pass


class EmptyInput(InputError):
    pass


class EmptySignal(InputError):
    pass


class DegenerateRange(InputError):
    pass


class AlphabetMismatch(InputError):
    pass


class AlphabetTooLarge(InputError):
    pass


class DimensionMismatch(InputError):
    pass


class NonPositiveWidth(InputError):
    pass


class InvalidSpec(InputError):
    pass


class MalformedFasta(InputError):
    pass


class UnknownSymbol(InputError):
    def __init__(self, token, position, header=None):
        self.token = token
        self.position = position
        self.header = header
        where = f" in record {header!r}" if header else ""
        super().__init__(f"unknown symbol {token!r} at position {position}{where}")


class DivisionByZeroBackground(InputError, ZeroDivisionError):
    pass


class FftSizeOverflow(NumericError):
    pass


class RoundingResidualExceeded(NumericError):
    def __init__(self, residual):
        self.residual = residual
        super().__init__(
            f"FFT rounding residual {residual:.3g} >= 0.25; counts are not trustworthy")


class IoFailure(InputError, OSError):
    pass


class MalformedConfig(InputError):
    pass
