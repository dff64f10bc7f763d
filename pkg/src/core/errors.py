"""Exception hierarchy and stable rejection codes."""

from enum import IntEnum
from typing import Optional


class RejectionReason(IntEnum):
    """Why a receiver refused a transfer. Values are wire codes."""
    BAD_BANK_SIG = 0x20
    BAD_PROOF = 0x21
    BROKEN_LINK = 0x22
    FOREIGN_RANDOMIZATION = 0x23
    BAD_D2 = 0x24
    BAD_THETA_SIG = 0x25
    BAD_PREV_THETA_SIG = 0x26
    MALFORMED_RANDOMIZATION = 0x27
    EMPTY_CHAIN = 0x28

    @property
    def label(self) -> str:
        return self.name.lower().replace("_", "-")


class EuroError(Exception):
    """Base class for everything raised by this package."""


class ParameterMismatchError(EuroError, ValueError):
    """Elements from different pairing parameters were combined."""


class DecodeError(EuroError, ValueError):
    """Bytes could not be decoded into the requested structure."""


class TruncatedError(DecodeError):
    """Input ended before the structure was complete."""


class UnknownTagError(DecodeError):
    """A frame carried a tag no message kind uses."""


class ProtocolError(EuroError):
    """A party or session was driven outside its state machine."""


class AlreadySpentError(ProtocolError):
    """An honest wallet refused to spend an entry twice."""


class InvalidKeyError(EuroError, ValueError):
    """A private key of zero was supplied."""


class AlreadyRegisteredError(EuroError):
    pass


class UnregisteredError(EuroError):
    pass


class UnknownKeyError(EuroError):
    """An extracted public key is not in the registry."""


class IdenticalListsError(EuroError, ValueError):
    """Two proof lists have no divergence index."""


class TransferRejected(EuroError):
    """A receiver (user or bank) refused a transfer bundle."""

    def __init__(self, reason: RejectionReason, index: Optional[int] = None):
        self.reason = reason
        self.index = index
        where = f"[{index}]" if index is not None else ""
        super().__init__(f"{reason.label}{where}")
