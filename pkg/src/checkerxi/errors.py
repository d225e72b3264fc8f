"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class CopulaError(ValueError):
    """Base class for every data/validation error raised by checkerxi."""


class NegativeEntry(CopulaError):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"entry ({i}, {j}) is negative: {value!r}")


class RowSumViolation(CopulaError):
    def __init__(self, i: int, actual: float, expected: float):
        self.i, self.actual, self.expected = i, actual, expected
        super().__init__(f"row {i} sums to {float(actual)!r}, expected {float(expected)!r}")


class ColSumViolation(CopulaError):
    def __init__(self, j: int, actual: float, expected: float):
        self.j, self.actual, self.expected = j, actual, expected
        super().__init__(f"column {j} sums to {float(actual)!r}, expected {float(expected)!r}")


class NotTwoIncreasing(CopulaError):
    def __init__(self, i: int, j: int, value: float):
        self.i, self.j, self.value = i, j, value
        super().__init__(f"grid difference at ({i}, {j}) is negative: {float(value)!r}")


class InvalidGrid(CopulaError):
    """Grid copula matrix violates its boundary or monotonicity constraints."""


class DimensionMismatch(CopulaError):
    pass


class InvalidPermutation(CopulaError):
    pass


class OutOfDomain(CopulaError):
    def __init__(self, u: float, v: float):
        self.u, self.v = u, v
        super().__init__(f"({u!r}, {v!r}) is outside the unit square")


class InvalidSample(CopulaError):
    pass


class TooFewSamples(CopulaError):
    pass


class DegenerateY(CopulaError):
    def __init__(self) -> None:
        super().__init__("all Y values are equal; the estimator denominator vanishes")


class MissingPartial(CopulaError):
    def __init__(self, what: str = "partial1"):
        super().__init__(f"copula evaluator does not provide {what}")


class NoConvergence(CopulaError):
    pass
