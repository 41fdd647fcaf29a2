"""Error types shared across the toolkit."""


class JtmError(Exception):
    """Base class for all toolkit errors."""

    code = "ERROR"

    def __init__(self, message=""):
        super().__init__(f"{self.code}: {message}" if message else self.code)
        self.message = message


class SyntaxInputError(JtmError):
    code = "SYNTAX"


class ShapeError(JtmError):
    code = "SHAPE"


class NonFiniteError(JtmError):
    code = "NONFINITE"


class TooShortError(JtmError):
    code = "TOO_SHORT"


class EmptyGridError(JtmError):
    code = "EMPTY_GRID"


class OutOfRangeError(JtmError):
    code = "OUT_OF_RANGE"


class ShapeMismatchError(JtmError):
    code = "SHAPE_MISMATCH"


class IdMismatchError(JtmError):
    code = "ID_MISMATCH"


class DimMismatchError(JtmError):
    code = "DIM_MISMATCH"
