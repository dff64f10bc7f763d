"""Binary message framing between parties.

Frame: tag u8 | length u32 big-endian | payload. Every group element is in
its canonical fixed-width encoding, scalars are fixed-width big-endian and
strings carry a u16 length prefix. docs/FORMATS.md lists each payload.
"""

import logging
import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import ClassVar, Dict, Optional, Tuple, Type

from ..core.codec import ByteReader, pack_str, pack_u8, pack_u32
from ..core.crs import CommonReferenceString
from ..core.errors import (
    AlreadyRegisteredError,
    DecodeError,
    EuroError,
    InvalidKeyError,
    ParameterMismatchError,
    ProtocolError,
    RejectionReason,
    TransferRejected,
    TruncatedError,
    UnknownKeyError,
    UnknownTagError,
    UnregisteredError,
)
from ..core.gsproof import RandomizationElements, TransactionProof
from ..core.pairing import G1Element, GroupParams, Scalar, load_group
from ..core.token import TransferBundle
from .bank import DepositStatus, DepositVerdict
from .ttp import RevocationResult, RevocationVerdict

FRAME_HEADER = struct.Struct("!BI")
NO_INDEX = 0xFFFFFFFF


class Tag(IntEnum):
    REGISTER = 0x01
    PARAMS_REQ = 0x02
    PARAMS_REP = 0x03
    WITHDRAW_INIT = 0x10
    WITHDRAW_NONCE = 0x11
    WITHDRAW_CHALLENGE = 0x12
    WITHDRAW_RESP = 0x13
    TRANSFER_INIT = 0x20
    TRANSFER_PAYLOAD = 0x21
    DEPOSIT_REQ = 0x30
    DEPOSIT_INIT = 0x31
    DEPOSIT_PAYLOAD = 0x32
    DEPOSIT_REP = 0x33
    REVOKE_REQ = 0x40
    REVOKE_REP = 0x41
    ACK = 0xF0
    ERR = 0xFF


class ErrorCode(IntEnum):
    """ERR codes below 0x20; codes from 0x20 up are RejectionReason values."""
    PROTOCOL = 0x01
    TRUNCATED = 0x02
    BAD_TAG = 0x03
    BAD_ELEMENT = 0x04
    ALREADY_REGISTERED = 0x05
    UNREGISTERED = 0x06
    UNKNOWN_KEY = 0x07
    INVALID_KEY = 0x08


class RemoteError(EuroError):
    """The peer answered with an ERR frame."""

    def __init__(self, code: int, index: Optional[int] = None):
        self.code = code
        self.index = index
        try:
            name = ErrorCode(code).name.lower()
        except ValueError:
            name = f"0x{code:02x}"
        super().__init__(f"peer reported {name}")


class Message:
    tag: ClassVar[Tag]

    def payload(self) -> bytes:
        return b""

    @classmethod
    def parse(cls, reader: ByteReader) -> "Message":
        return cls()


@dataclass(frozen=True)
class Register(Message):
    tag: ClassVar[Tag] = Tag.REGISTER
    identity: str
    pubkey: G1Element

    def payload(self) -> bytes:
        return pack_str(self.identity) + self.pubkey.to_bytes()

    @classmethod
    def parse(cls, reader: ByteReader) -> "Register":
        return cls(reader.string(), reader.g1())


@dataclass(frozen=True)
class ParamsReq(Message):
    tag: ClassVar[Tag] = Tag.PARAMS_REQ


@dataclass(frozen=True)
class ParamsRep(Message):
    """CRS (params-id prefixed) | has-bank-key u8 | bank pk."""
    tag: ClassVar[Tag] = Tag.PARAMS_REP
    crs: CommonReferenceString
    bank_pk: Optional[G1Element] = None

    def payload(self) -> bytes:
        bank = pack_u8(0) if self.bank_pk is None else pack_u8(1) + self.bank_pk.to_bytes()
        return self.crs.to_bytes() + bank

    @classmethod
    def parse(cls, reader: ByteReader) -> "ParamsRep":
        # the CRS names its own parameters, so a fresh client can bootstrap from it
        start = reader.offset
        params_id = reader.string()
        reader.offset = start
        try:
            reader.params = load_group(params_id)
        except ValueError as e:
            raise DecodeError(f"unknown parameters {params_id!r}") from e
        crs = CommonReferenceString.read(reader)
        has_bank = reader.u8()
        if has_bank not in (0, 1):
            raise DecodeError(f"invalid bank-key flag {has_bank}")
        return cls(crs, reader.g1() if has_bank else None)


@dataclass(frozen=True)
class WithdrawInit(Message):
    tag: ClassVar[Tag] = Tag.WITHDRAW_INIT
    pubkey: G1Element

    def payload(self) -> bytes:
        return self.pubkey.to_bytes()

    @classmethod
    def parse(cls, reader: ByteReader) -> "WithdrawInit":
        return cls(reader.g1())


@dataclass(frozen=True)
class WithdrawNonce(Message):
    tag: ClassVar[Tag] = Tag.WITHDRAW_NONCE
    r: G1Element

    def payload(self) -> bytes:
        return self.r.to_bytes()

    @classmethod
    def parse(cls, reader: ByteReader) -> "WithdrawNonce":
        return cls(reader.g1())


@dataclass(frozen=True)
class WithdrawChallenge(Message):
    tag: ClassVar[Tag] = Tag.WITHDRAW_CHALLENGE
    c_prime: Scalar
    params: GroupParams

    def payload(self) -> bytes:
        return self.params.encode_scalar(self.c_prime)

    @classmethod
    def parse(cls, reader: ByteReader) -> "WithdrawChallenge":
        return cls(reader.scalar(), reader.params)


@dataclass(frozen=True)
class WithdrawResp(Message):
    tag: ClassVar[Tag] = Tag.WITHDRAW_RESP
    sigma_prime: Scalar
    params: GroupParams

    def payload(self) -> bytes:
        return self.params.encode_scalar(self.sigma_prime)

    @classmethod
    def parse(cls, reader: ByteReader) -> "WithdrawResp":
        return cls(reader.scalar(), reader.params)


@dataclass(frozen=True)
class TransferInit(Message):
    tag: ClassVar[Tag] = Tag.TRANSFER_INIT
    rand: RandomizationElements

    def payload(self) -> bytes:
        return self.rand.to_bytes()

    @classmethod
    def parse(cls, reader: ByteReader) -> "TransferInit":
        return cls(RandomizationElements.read(reader))


@dataclass(frozen=True)
class TransferPayload(Message):
    tag: ClassVar[Tag] = Tag.TRANSFER_PAYLOAD
    bundle: TransferBundle

    def payload(self) -> bytes:
        return self.bundle.to_bytes()

    @classmethod
    def parse(cls, reader: ByteReader) -> "TransferPayload":
        return cls(TransferBundle.read(reader))


@dataclass(frozen=True)
class DepositReq(Message):
    tag: ClassVar[Tag] = Tag.DEPOSIT_REQ
    pubkey: G1Element

    def payload(self) -> bytes:
        return self.pubkey.to_bytes()

    @classmethod
    def parse(cls, reader: ByteReader) -> "DepositReq":
        return cls(reader.g1())


@dataclass(frozen=True)
class DepositInit(TransferInit):
    tag: ClassVar[Tag] = Tag.DEPOSIT_INIT


@dataclass(frozen=True)
class DepositPayload(TransferPayload):
    tag: ClassVar[Tag] = Tag.DEPOSIT_PAYLOAD


_STATUS_CODES = {DepositStatus.ACCEPTED: 0, DepositStatus.DOUBLE_SPEND: 1, DepositStatus.REJECTED: 2}
_STATUS_BY_CODE = {code: status for status, code in _STATUS_CODES.items()}


def _pack_index(index: Optional[int]) -> bytes:
    return pack_u32(NO_INDEX if index is None else index)


def _read_index(reader: ByteReader) -> Optional[int]:
    value = reader.u32()
    return None if value == NO_INDEX else value


@dataclass(frozen=True)
class DepositRep(Message):
    """status u8 | identity str | reason u8 (0 = none) | index u32 | divergence u32."""
    tag: ClassVar[Tag] = Tag.DEPOSIT_REP
    verdict: DepositVerdict

    def payload(self) -> bytes:
        v = self.verdict
        return b"".join([
            pack_u8(_STATUS_CODES[v.status]),
            pack_str(v.identity or ""),
            pack_u8(int(v.reason) if v.reason is not None else 0),
            _pack_index(v.index),
            _pack_index(v.divergence),
        ])

    @classmethod
    def parse(cls, reader: ByteReader) -> "DepositRep":
        code = reader.u8()
        if code not in _STATUS_BY_CODE:
            raise DecodeError(f"invalid deposit status {code}")
        identity = reader.string() or None
        reason_code = reader.u8()
        try:
            reason = RejectionReason(reason_code) if reason_code else None
        except ValueError as e:
            raise DecodeError(f"invalid rejection reason {reason_code}") from e
        index, divergence = _read_index(reader), _read_index(reader)
        return cls(DepositVerdict(_STATUS_BY_CODE[code], identity, reason, index, divergence))


@dataclass(frozen=True)
class RevokeReq(Message):
    """Exactly two proofs, nothing else from the euros they came from."""
    tag: ClassVar[Tag] = Tag.REVOKE_REQ
    proof_a: TransactionProof
    proof_b: TransactionProof

    def payload(self) -> bytes:
        return self.proof_a.to_bytes() + self.proof_b.to_bytes()

    @classmethod
    def parse(cls, reader: ByteReader) -> "RevokeReq":
        return cls(TransactionProof.read(reader), TransactionProof.read(reader))


@dataclass(frozen=True)
class RevokeRep(Message):
    """identified u8 | identity str."""
    tag: ClassVar[Tag] = Tag.REVOKE_REP
    result: RevocationResult

    def payload(self) -> bytes:
        return pack_u8(1 if self.result.identified else 0) + pack_str(self.result.identity or "")

    @classmethod
    def parse(cls, reader: ByteReader) -> "RevokeRep":
        identified = reader.u8()
        if identified not in (0, 1):
            raise DecodeError(f"invalid revocation flag {identified}")
        identity = reader.string() or None
        if identified:
            return cls(RevocationResult(RevocationVerdict.IDENTIFIED, identity))
        return cls(RevocationResult(RevocationVerdict.NOT_DOUBLE_SPEND))


@dataclass(frozen=True)
class Ack(Message):
    tag: ClassVar[Tag] = Tag.ACK


@dataclass(frozen=True)
class Err(Message):
    """code u8 | index u32 (0xFFFFFFFF = none)."""
    tag: ClassVar[Tag] = Tag.ERR
    code: int
    index: Optional[int] = None

    def payload(self) -> bytes:
        return pack_u8(self.code) + _pack_index(self.index)

    @classmethod
    def parse(cls, reader: ByteReader) -> "Err":
        return cls(reader.u8(), _read_index(reader))

    def to_exception(self) -> EuroError:
        if self.code >= 0x20:
            try:
                return TransferRejected(RejectionReason(self.code), self.index)
            except ValueError:
                pass
        return RemoteError(self.code, self.index)


MESSAGE_TYPES: Dict[Tag, Type[Message]] = {
    cls.tag: cls
    for cls in (
        Register, ParamsReq, ParamsRep, WithdrawInit, WithdrawNonce, WithdrawChallenge,
        WithdrawResp, TransferInit, TransferPayload, DepositReq, DepositInit, DepositPayload,
        DepositRep, RevokeReq, RevokeRep, Ack, Err,
    )
}


def encode(message: Message) -> bytes:
    payload = message.payload()
    return FRAME_HEADER.pack(int(message.tag), len(payload)) + payload


def split_frame(frame: bytes) -> Tuple[int, bytes]:
    """Validate the header against the frame length; returns (tag byte, payload)."""
    if len(frame) < FRAME_HEADER.size:
        raise TruncatedError("frame shorter than its header")
    tag, length = FRAME_HEADER.unpack_from(frame, 0)
    payload = frame[FRAME_HEADER.size:]
    if len(payload) < length:
        raise TruncatedError(f"frame declares {length} payload bytes, has {len(payload)}")
    if len(payload) > length:
        raise DecodeError(f"{len(payload) - length} bytes after the declared payload")
    return tag, payload


def decode(frame: bytes, params: GroupParams) -> Message:
    tag, payload = split_frame(frame)
    try:
        cls = MESSAGE_TYPES[Tag(tag)]
    except ValueError as e:
        raise UnknownTagError(f"unknown tag 0x{tag:02x}") from e
    reader = ByteReader(payload, params)
    message = cls.parse(reader)
    reader.done()
    return message


def error_for(exc: BaseException) -> Err:
    """Map a local failure onto the ERR frame sent back to the peer."""
    if isinstance(exc, TransferRejected):
        return Err(int(exc.reason), exc.index)
    if isinstance(exc, TruncatedError):
        return Err(ErrorCode.TRUNCATED)
    if isinstance(exc, UnknownTagError):
        return Err(ErrorCode.BAD_TAG)
    if isinstance(exc, (DecodeError, ParameterMismatchError)):
        return Err(ErrorCode.BAD_ELEMENT)
    if isinstance(exc, AlreadyRegisteredError):
        return Err(ErrorCode.ALREADY_REGISTERED)
    if isinstance(exc, UnregisteredError):
        return Err(ErrorCode.UNREGISTERED)
    if isinstance(exc, UnknownKeyError):
        return Err(ErrorCode.UNKNOWN_KEY)
    if isinstance(exc, InvalidKeyError):
        return Err(ErrorCode.INVALID_KEY)
    if not isinstance(exc, ProtocolError):
        logging.error(f"Unexpected error mapped to protocol error: {exc!r}")
    return Err(ErrorCode.PROTOCOL)
