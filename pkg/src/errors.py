"""Exception hierarchy shared by every hybis package."""

from typing import Optional


class HybisError(Exception):
    """Base class for all errors raised by the toolkit."""


class ParseError(HybisError):
    """
    Raised when formula text cannot be parsed.

    Attributes:
        offset (int): Byte offset of the offending token in the input.
    """
    def __init__(self, message: str, offset: int) -> None:
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class SignatureError(HybisError):
    pass


class ModelError(HybisError):
    pass


class FixtureError(ModelError):
    pass


class EvaluationError(HybisError):
    pass


class TranslationError(HybisError):
    pass


class FamilyError(HybisError):
    pass


class ResourceGuardError(HybisError):
    pass


class OracleCapExceeded(ResourceGuardError):
    """
    Raised when the oracle materializes more representatives than allowed.

    Attributes:
        stratum (Optional[int]): Degree of the stratum being built when the cap was hit.
    """
    def __init__(self, message: str, stratum: Optional[int] = None) -> None:
        super().__init__(message)
        self.stratum = stratum
