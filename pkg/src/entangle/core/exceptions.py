"""
Exception hierarchy shared by every processor and the CLI
"""

from typing import Any, Dict, Optional


class EntangleError(Exception):
    """Base error carrying a message and structured context for logging"""

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context: Dict[str, Any] = context

    def to_dict(self) -> Dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "context": {key: _plain(value) for key, value in self.context.items()},
        }


def _plain(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return str(value)


# Invalid input (exit code 2)

class InputError(EntangleError):
    """The caller supplied something that violates a precondition"""


class DimensionMismatch(InputError):
    pass


class NonFinite(InputError):
    pass


class NonHermitian(InputError):
    pass


class InvalidDensity(InputError):
    pass


class NonCommuting(InputError):
    pass


class NotTensorSystem(InputError):
    pass


class SizeLimit(InputError):
    pass


class FamilyNotInAlgebra(InputError):
    pass


class NotInAlgebra(InputError):
    pass


class NormExceeded(InputError):
    pass


class WrongAlgebra(InputError):
    pass


class NotNormalized(InputError):
    pass


class InvalidOperation(InputError):
    pass


class InvalidRegions(InputError):
    pass


class UnknownSuite(InputError):
    pass


class DocumentError(InputError):
    """Input document failed to parse or validate"""

    def __init__(self, message: str, line: Optional[int] = None, **context: Any):
        super().__init__(message, line=line, **context)
        self.line = line


# Structural outcomes of a computation

class ComputationError(EntangleError):
    """A well-formed input for which the requested construction does not exist"""


class AbelianAlgebra(ComputationError):
    pass


class AbelianCorner(ComputationError):
    pass


class NotCyclic(ComputationError):
    pass


class NullSelection(ComputationError):
    pass


class DegenerateRandomization(ComputationError):
    pass


# Internal consistency (exit code 3)

class InvariantViolation(EntangleError):
    """A runtime check of a mathematical invariant failed"""
