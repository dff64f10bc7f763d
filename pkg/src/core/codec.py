"""Fixed-width binary building blocks shared by every serialized structure."""

import struct
from typing import Callable, List, TypeVar, cast

from .errors import DecodeError, TruncatedError
from .pairing import G1Element, G2Element, GroupKind, GroupParams, GTElement, Scalar

_U8 = struct.Struct("!B")
_U16 = struct.Struct("!H")
_U32 = struct.Struct("!I")

T = TypeVar("T")


def pack_u8(value: int) -> bytes:
    return _U8.pack(value)


def pack_u16(value: int) -> bytes:
    return _U16.pack(value)


def pack_u32(value: int) -> bytes:
    return _U32.pack(value)


def pack_str(value: str) -> bytes:
    """u16 length followed by UTF-8 bytes."""
    raw = value.encode("utf-8")
    if len(raw) > 0xFFFF:
        raise ValueError("string longer than 65535 bytes")
    return _U16.pack(len(raw)) + raw


class ByteReader:
    """Sequential reader over a byte string; every short read raises DecodeError."""

    def __init__(self, data: bytes, params: GroupParams):
        self.data = bytes(data)
        self.params = params
        self.offset = 0

    @property
    def remaining(self) -> int:
        return len(self.data) - self.offset

    def take(self, n: int) -> bytes:
        if n > self.remaining:
            raise TruncatedError(f"truncated: wanted {n} bytes at offset {self.offset}, "
                                 f"{self.remaining} left")
        chunk = self.data[self.offset:self.offset + n]
        self.offset += n
        return chunk

    def u8(self) -> int:
        return int(_U8.unpack(self.take(1))[0])

    def u16(self) -> int:
        return int(_U16.unpack(self.take(2))[0])

    def u32(self) -> int:
        return int(_U32.unpack(self.take(4))[0])

    def string(self) -> str:
        raw = self.take(self.u16())
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as e:
            raise DecodeError(f"invalid UTF-8 string: {e}") from e

    def scalar(self) -> Scalar:
        return self.params.decode_scalar(self.take(self.params.scalar_size))

    def _element(self, kind: GroupKind) -> object:
        return self.params.deserialize_element(self.take(self.params.element_size(kind)), kind)

    def g1(self) -> G1Element:
        return cast(G1Element, self._element(GroupKind.G1))

    def g2(self) -> G2Element:
        return cast(G2Element, self._element(GroupKind.G2))

    def gt(self) -> GTElement:
        return cast(GTElement, self._element(GroupKind.GT))

    def many(self, count: int, read: Callable[["ByteReader"], T]) -> List[T]:
        return [read(self) for _ in range(count)]

    def done(self) -> None:
        if self.remaining:
            raise DecodeError(f"{self.remaining} trailing bytes")
