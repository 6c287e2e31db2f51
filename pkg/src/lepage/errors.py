"""Exception hierarchy shared by all modules."""


class LepageError(Exception):
    """Base class for every error raised by this package."""


class ExprSyntaxError(LepageError, ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class UnknownIdentifier(LepageError, ValueError):
    def __init__(self, name: str, position: int | None = None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"unknown identifier {name!r}{where}")
        self.name = name
        self.position = position


class NonIntegerExponent(LepageError, ValueError):
    pass


class UnboundName(LepageError, KeyError):
    def __init__(self, name: str):
        super().__init__(name)
        self.name = name

    def __str__(self):
        return f"no value bound for {self.name!r}"


class DivisionByZero(LepageError, ZeroDivisionError):
    pass


class DomainError(LepageError, ValueError):
    pass


class NotPolynomial(LepageError, ValueError):
    pass


class IndexOutOfRange(LepageError, IndexError):
    pass


class NotQuadraticInVelocities(LepageError, ValueError):
    pass


class DimensionTooSmall(LepageError, ValueError):
    pass


class SizeLimitExceeded(LepageError, ValueError):
    pass


class SingularMatrix(LepageError, ArithmeticError):
    pass


class NotAntisymmetric(LepageError, ValueError):
    pass


class OddSize(LepageError, ValueError):
    pass


class SearchFailed(LepageError, RuntimeError):
    pass


class NewtonDivergence(LepageError, ArithmeticError):
    pass


class NotRegular(LepageError, ValueError):
    pass


class GridTooSmall(LepageError, ValueError):
    pass


class UnknownPreset(LepageError, KeyError):
    def __str__(self):
        return f"unknown preset {self.args[0]!r}"


class SchemaError(LepageError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
