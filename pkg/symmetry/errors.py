class SymmetryError(Exception):
    """Base class of every error raised by the engine."""


class ParseError(SymmetryError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}, column {column}: " if column is not None else f"line {line}: "
        super().__init__(where + message)


class UndeclaredSymbolError(ParseError):
    pass


class DependencyError(SymmetryError):
    pass


class SubstitutionError(SymmetryError):
    pass


class NonPolynomialError(SymmetryError):
    pass


class OrderOverflowError(SymmetryError):
    pass


class ModeError(SymmetryError):
    pass


class ProlongationError(SymmetryError):
    pass


class SpecError(SymmetryError):
    pass


class NonlinearSystemError(SymmetryError):
    pass


class SpaceMismatchError(SymmetryError):
    pass


class ClosureError(SymmetryError):
    def __init__(self, pair, message):
        self.pair = pair
        super().__init__(message)


class UnsupportedSeriesError(SymmetryError):
    pass


class UnsupportedFlowError(SymmetryError):
    pass


class NonInvertibleError(SymmetryError):
    pass


class UnsupportedShapeError(SymmetryError):
    pass
