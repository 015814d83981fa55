"""Domain error hierarchy.

Every error carries a stable machine-readable ``code`` token and a distinct
process exit code so CLI failures are scriptable: the CLI prints a single
``<code>: <message>`` line on stderr and exits with ``exit_code``.
"""

from __future__ import annotations


class VfslError(Exception):
    """Base class for all vfsl errors."""

    code = "Error"
    exit_code = 1


class IoFailureError(VfslError):
    code = "IoFailure"
    exit_code = 3


class BadMagicError(VfslError):
    code = "BadMagic"
    exit_code = 4


class UnsupportedVersionError(VfslError):
    code = "UnsupportedVersion"
    exit_code = 5


class TruncatedPayloadError(VfslError):
    code = "TruncatedPayload"
    exit_code = 6


class NonFiniteEntryError(VfslError):
    code = "NonFiniteEntry"
    exit_code = 7


class NameCountMismatchError(VfslError):
    code = "NameCountMismatch"
    exit_code = 8


class EmptyMatrixError(VfslError):
    code = "EmptyMatrix"
    exit_code = 9


class RaggedRowsError(VfslError):
    code = "RaggedRows"
    exit_code = 10


class ParseFailureError(VfslError):
    code = "ParseFailure"
    exit_code = 11


class ZeroNormRowError(VfslError):
    code = "ZeroNormRow"
    exit_code = 12

    def __init__(self, row: int):
        super().__init__(f"row {row} has L2 norm below 1e-12 and cannot be normalized")
        self.row = row


class DimensionMismatchError(VfslError):
    code = "DimensionMismatch"
    exit_code = 13


class NotNormalizedError(VfslError):
    code = "NotNormalized"
    exit_code = 14


class SingularSystemError(VfslError):
    code = "SingularSystem"
    exit_code = 15


class InsufficientPromptsError(VfslError):
    code = "InsufficientPrompts"
    exit_code = 16


class EmptyClassError(VfslError):
    code = "EmptyClass"
    exit_code = 17

    def __init__(self, label: int):
        super().__init__(f"class {label} has no examples")
        self.label = label


class NotEnoughItemsError(VfslError):
    code = "NotEnoughItems"
    exit_code = 18

    def __init__(self, label: int, have: int, need: int):
        super().__init__(f"class {label} has {have} items but {need} shots were requested")
        self.label = label
        self.have = have
        self.need = need
