"""Exception hierarchy shared by all modules."""


class BundleError(Exception):
    """Base class for every error raised by this package."""


class ExprSyntaxError(BundleError, SyntaxError):
    """Malformed expression source; ``offset`` is the 0-based byte offset."""

    def __init__(self, message: str, source: str, offset: int):
        self.source = source
        self.offset = offset
        super().__init__(f"{message} at offset {offset}")


class UnknownIdentifier(BundleError):
    def __init__(self, name: str, offset: int):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class DomainError(BundleError, ArithmeticError):
    """An expression was evaluated outside the domain of one of its functions."""


class NotPositiveDefinite(BundleError):
    def __init__(self, point):
        self.point = tuple(float(v) for v in point)
        super().__init__(f"metric is not positive definite at x = {self.point}")


class BadParameter(BundleError, ValueError):
    pass


class ShapeMismatch(BundleError, ValueError):
    pass


class NonPositiveRescale(BundleError):
    def __init__(self, value, point):
        self.value = float(value)
        self.point = tuple(float(v) for v in point)
        super().__init__(f"rescaling function f = {self.value} <= 0 at x = {self.point}")


class DimensionGuard(BundleError):
    pass


class StepUnderflow(BundleError):
    pass


class ChartExit(BundleError):
    def __init__(self, point, s=None):
        self.point = tuple(float(v) for v in point)
        self.s = s
        if s is None:
            super().__init__(f"point outside the chart box: x = {self.point}")
        else:
            super().__init__(f"curve left the chart box at s = {s:.6g}: x = {self.point}")


class ConfigError(BundleError):
    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")
