"""Exception types raised by model constructors and analysis passes."""

from __future__ import annotations


class ModelError(Exception):
    """Base class for all structural errors; carries a stable code for reports."""

    code = "MODEL"


class InvalidName(ModelError):
    code = "INVALID_NAME"


class DuplicateId(ModelError):
    code = "DUPLICATE_ID"


class UnknownId(ModelError):
    code = "UNKNOWN_ID"


class InvalidKind(ModelError):
    code = "INVALID_KIND"


class IllegalFlow(ModelError):
    """A flow edge whose (source kind, target kind, same-owner) row is not legal."""

    code = "ILLEGAL_FLOW"

    def __init__(self, message: str, row: tuple[str, str, bool]):
        super().__init__(message)
        self.row = row


class RedundantTrigger(ModelError):
    code = "REDUNDANT_TRIGGER"


class DisconnectedCover(ModelError):
    code = "DISCONNECTED_COVER"


class InvalidDuration(ModelError):
    code = "INVALID_DURATION"


class ChronoCycle(ModelError):
    code = "CHRONO_CYCLE"


class TooManyInputs(ModelError):
    code = "TOO_MANY_INPUTS"


class NoEvents(ModelError):
    code = "NO_EVENTS"
