"""Exception types raised across the pipeline."""


class IdsError(Exception):
    """Base class for all pipeline errors."""


class MalformedRecord(IdsError, ValueError):
    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class UnknownAttackName(IdsError, KeyError):
    def __str__(self) -> str:
        return str(self.args[0]) if self.args else "unknown attack name"


class SampleTooLarge(IdsError, ValueError):
    pass


class EmptyDataset(IdsError, ValueError):
    pass


class NonFiniteInput(IdsError, ValueError):
    pass


class NoConvergence(IdsError, RuntimeError):
    pass


class RankOutOfRange(IdsError, ValueError):
    pass


class DimensionMismatch(IdsError, ValueError):
    pass


class DegenerateLabels(IdsError, ValueError):
    pass


class KTooLarge(IdsError, ValueError):
    pass


class LengthMismatch(IdsError, ValueError):
    pass


class EmptyInput(IdsError, ValueError):
    pass


class IoFailure(IdsError, OSError):
    pass


class ChecksumMismatch(IdsError, ValueError):
    pass


class VersionMismatch(IdsError, ValueError):
    pass
