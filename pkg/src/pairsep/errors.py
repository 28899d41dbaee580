"""Exception hierarchy shared by every module."""


class PairsepError(Exception):
    """Base class for all toolkit errors."""


class DomainError(PairsepError, ValueError):
    """An argument lies outside the domain of the operation."""


class DataError(PairsepError, ValueError):
    """Input data is malformed (non-finite values, ragged rows, ...)."""


class ContractError(PairsepError):
    """A structural precondition on the inputs does not hold."""


class SizeError(DomainError):
    """A requested instance is too large to represent."""


class NotSeparableError(PairsepError):
    """Some pair of classes is separated by none of the candidate models."""

    def __init__(self, pair):
        self.pair = pair
        super().__init__(f"pair {pair} is not separated by any candidate model")


class BudgetError(PairsepError):
    """Exhaustive search exceeded its node or size budget."""


class DegenerateVarianceError(DomainError):
    """A correlation was requested on a series with zero variance."""
