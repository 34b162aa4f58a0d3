"""Exception hierarchy shared across the package."""


class ContractError(ValueError):
    """A documented precondition was violated by the caller."""


class ShapeMismatchError(ContractError):
    """Operand shapes are incompatible; the message names both shapes."""


class NumericError(ArithmeticError):
    """A computation received or produced non-finite values."""


class NanLossError(NumericError):
    """Training loss became NaN; the message names the offending batch."""


class EmptyDatasetError(ContractError):
    """A series is too short to produce a single (look-back, horizon) pair."""


class DataError(ValueError):
    """An input file could not be parsed; the message names the location."""


class UndefinedMetricError(ValueError):
    """A metric is mathematically undefined for the given inputs."""


class CheckpointError(Exception):
    """A checkpoint file is missing, malformed, or inconsistent."""
