"""Exception types shared across the library."""


class FracCalcError(Exception):
    """Base class for all errors raised by fraccalc."""


class ParseError(FracCalcError):
    """Malformed expression source.  ``offset`` is the byte position."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownIdentifierError(ParseError):
    """Identifier that is neither a known function nor a constant."""

    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier '{name}'", offset)
        self.name = name


class DomainError(FracCalcError):
    """Evaluation or differentiation outside a node's real domain."""


class AssumptionError(FracCalcError):
    """A computation that requires f(a) = 0 was handed f(a) != 0."""


class HypothesisError(FracCalcError):
    """A stated precondition (monotonicity, periodicity, ...) fails."""


class MeanValueNotFoundError(FracCalcError):
    """No mean-value crossing was bracketed on the scan grid."""


class SolverError(FracCalcError):
    """A root whose existence is guaranteed could not be located."""
