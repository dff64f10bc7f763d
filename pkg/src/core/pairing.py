"""Pairing-group abstraction.

A `GroupParams` wraps one pairing backend (see `backends.py`) and exposes the
bilinear group description: groups G1, G2, GT of prime order p, generators
g1 and g2, the pairing, scalar arithmetic mod p, hashing into Z_p and
canonical fixed-width element encodings.

Elements are immutable wrappers that carry their parameters, so combining
elements from two different parameter sets raises `ParameterMismatchError`.
Exponents are plain Python ints, always reduced mod p before use.
"""

import hashlib
import logging
import random
import secrets
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from functools import cached_property, lru_cache
from typing import Any, ClassVar, Dict, Sequence, Tuple, Type, TypeVar

from .errors import DecodeError, ParameterMismatchError

Scalar = int

# Hash domain tags, one per context the hash is used in
DOMAIN_WITHDRAW = b"withdraw-msg"
DOMAIN_THETA = b"theta-sig"
DOMAIN_GT = b"gt-embed"


class GroupKind(Enum):
    G1 = 1
    G2 = 2
    GT = 3


class PairingBackend(ABC):
    """Curve arithmetic provider. Values it handles are backend-native objects."""

    name: str
    symmetric: bool
    order: int

    @abstractmethod
    def generator(self, kind: GroupKind) -> Any:
        """Fixed generator of the group (e(g1, g2) for GT)."""

    @abstractmethod
    def identity(self, kind: GroupKind) -> Any:
        """Neutral element of the group."""

    @abstractmethod
    def op(self, kind: GroupKind, a: Any, b: Any) -> Any:
        """Group operation, written multiplicatively."""

    @abstractmethod
    def exp(self, kind: GroupKind, a: Any, k: int) -> Any:
        """a^k for a scalar already reduced mod p."""

    @abstractmethod
    def inverse(self, kind: GroupKind, a: Any) -> Any: ...

    @abstractmethod
    def eq(self, kind: GroupKind, a: Any, b: Any) -> bool: ...

    @abstractmethod
    def pair(self, a: Any, b: Any) -> Any:
        """Single pairing of a G1 and a G2 value."""

    @abstractmethod
    def encode(self, kind: GroupKind, value: Any) -> bytes:
        """Canonical fixed-width encoding."""

    @abstractmethod
    def decode(self, kind: GroupKind, data: bytes) -> Any:
        """Inverse of `encode`; raises DecodeError unless the value is in the order-p subgroup."""

    @abstractmethod
    def element_size(self, kind: GroupKind) -> int:
        """Encoded width in bytes."""

    def pair_product(self, pairs: Sequence[Tuple[Any, Any]]) -> Any:
        """Product of pairings. Backends override this with a multi-pairing."""
        result = self.identity(GroupKind.GT)
        for a, b in pairs:
            result = self.op(GroupKind.GT, result, self.pair(a, b))
        return result


E = TypeVar("E", bound="Element")


@dataclass(frozen=True, eq=False)
class Element:
    """Group element bound to its parameters."""
    params: "GroupParams"
    value: Any

    kind: ClassVar[GroupKind]

    def _check(self, other: "Element") -> None:
        if type(other) is not type(self):
            raise TypeError(f"cannot combine {type(self).__name__} with {type(other).__name__}")
        if other.params is not self.params:
            raise ParameterMismatchError(
                f"elements from {self.params.params_id} and {other.params.params_id}"
            )

    def __mul__(self: E, other: E) -> E:
        self._check(other)
        backend = self.params.backend
        return type(self)(self.params, backend.op(self.kind, self.value, other.value))

    def __truediv__(self: E, other: E) -> E:
        return self * other.inverse()

    def __pow__(self: E, k: int) -> E:
        backend = self.params.backend
        return type(self)(self.params, backend.exp(self.kind, self.value, k % self.params.order))

    def inverse(self: E) -> E:
        return type(self)(self.params, self.params.backend.inverse(self.kind, self.value))

    def is_identity(self) -> bool:
        return self == self.params.identity(self.kind)

    def to_bytes(self) -> bytes:
        """Canonical encoding; the identity is all zeros."""
        return self.params.backend.encode(self.kind, self.value)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Element) or other.kind is not self.kind:
            return NotImplemented
        if other.params is not self.params:
            return False
        return self.params.backend.eq(self.kind, self.value, other.value)

    def __hash__(self) -> int:
        return hash((self.kind, self.to_bytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_bytes().hex()[:16]}...)"


class G1Element(Element):
    kind = GroupKind.G1


class G2Element(Element):
    kind = GroupKind.G2


class GTElement(Element):
    kind = GroupKind.GT


ELEMENT_TYPES: Dict[GroupKind, Type[Element]] = {
    GroupKind.G1: G1Element,
    GroupKind.G2: G2Element,
    GroupKind.GT: GTElement,
}

ExtendedPairing = Tuple[Tuple[GTElement, GTElement], Tuple[GTElement, GTElement]]


@dataclass(frozen=True, eq=False)
class GroupParams:
    """Bilinear group description (G1, G2, GT, e, g1, g2) of prime order p."""
    backend: PairingBackend

    @property
    def params_id(self) -> str:
        return self.backend.name

    @property
    def order(self) -> int:
        return self.backend.order

    @property
    def symmetric(self) -> bool:
        return self.backend.symmetric

    @cached_property
    def g1(self) -> G1Element:
        return G1Element(self, self.backend.generator(GroupKind.G1))

    @cached_property
    def g2(self) -> G2Element:
        return G2Element(self, self.backend.generator(GroupKind.G2))

    @cached_property
    def gt(self) -> GTElement:
        """e(g1, g2), the base of every target."""
        return pair(self.g1, self.g2)

    @cached_property
    def scalar_size(self) -> int:
        return (self.order.bit_length() + 7) // 8

    def identity(self, kind: GroupKind) -> Element:
        """Neutral element of `kind`."""
        return ELEMENT_TYPES[kind](self, self.backend.identity(kind))

    def element_size(self, kind: GroupKind) -> int:
        return self.backend.element_size(kind)

    # Scalars

    def random_scalar(self, rng: random.Random) -> Scalar:
        """Uniform nonzero scalar."""
        return rng.randrange(1, self.order)

    def inverse_scalar(self, x: Scalar) -> Scalar:
        """x^-1 mod p."""
        if x % self.order == 0:
            raise ValueError("zero has no inverse mod p")
        return pow(x, -1, self.order)

    def encode_scalar(self, x: Scalar) -> bytes:
        """Reduced mod p and written big-endian in `scalar_size` bytes."""
        return (x % self.order).to_bytes(self.scalar_size, "big")

    def decode_scalar(self, data: bytes) -> Scalar:
        """Strict inverse of `encode_scalar`: exact width, value below p."""
        if len(data) != self.scalar_size:
            raise DecodeError(f"scalar must be {self.scalar_size} bytes, got {len(data)}")
        value = int.from_bytes(data, "big")
        if value >= self.order:
            raise DecodeError("scalar out of range")
        return value

    def hash_to_scalar(self, message: bytes, domain: bytes = b"") -> Scalar:
        """SHA-256 of the tagged message, reduced mod p."""
        digest = hashlib.sha256(bytes([len(domain)]) + domain + message).digest()
        return int.from_bytes(digest, "big") % self.order

    def gt_to_scalar(self, t: GTElement) -> Scalar:
        """Embed a target into Z_p by hashing its encoding."""
        return self.hash_to_scalar(t.to_bytes(), DOMAIN_GT)

    # Elements

    def serialize_element(self, e: Element) -> bytes:
        """Encode an element that must belong to these parameters."""
        if e.params is not self:
            raise ParameterMismatchError(f"element belongs to {e.params.params_id}")
        return e.to_bytes()

    def deserialize_element(self, data: bytes, kind: GroupKind) -> Element:
        """Decode and validate one element of `kind`."""
        size = self.element_size(kind)
        if len(data) != size:
            raise DecodeError(f"{kind.name} encoding must be {size} bytes, got {len(data)}")
        return ELEMENT_TYPES[kind](self, self.backend.decode(kind, bytes(data)))

    def pair_product(self, pairs: Sequence[Tuple[G1Element, G2Element]]) -> GTElement:
        for a, b in pairs:
            _check_pair_args(self, a, b)
        value = self.backend.pair_product([(a.value, b.value) for a, b in pairs])
        return GTElement(self, value)


def _check_pair_args(params: GroupParams, a: Element, b: Element) -> None:
    if not isinstance(a, G1Element) or not isinstance(b, G2Element):
        raise TypeError("pairing takes a G1 element and a G2 element")
    if a.params is not params or b.params is not params:
        raise ParameterMismatchError(
            f"pairing {a.params.params_id} with {b.params.params_id}"
        )


def pair(a: G1Element, b: G2Element) -> GTElement:
    """Bilinear map e: G1 x G2 -> GT."""
    params = a.params
    _check_pair_args(params, a, b)
    return GTElement(params, params.backend.pair(a.value, b.value))


def extended_pair(
    col: Tuple[G1Element, G1Element], row: Tuple[G2Element, G2Element]
) -> ExtendedPairing:
    """2x2 matrix whose (i, j) entry is e(col[i], row[j])."""
    return (
        (pair(col[0], row[0]), pair(col[0], row[1])),
        (pair(col[1], row[0]), pair(col[1], row[1])),
    )


def hash_to_scalar(params: GroupParams, message: bytes, domain: bytes = b"") -> Scalar:
    return params.hash_to_scalar(message, domain)


def gt_to_scalar(t: GTElement) -> Scalar:
    return t.params.gt_to_scalar(t)


def serialize_element(e: Element) -> bytes:
    """Encode `e` under its own parameters."""
    return e.params.serialize_element(e)


def deserialize_element(data: bytes, params: GroupParams, kind: GroupKind) -> Element:
    return params.deserialize_element(data, kind)


def default_rng() -> random.Random:
    """OS randomness, used whenever no seed is given."""
    return secrets.SystemRandom()


def seeded_rng(seed: int, label: str) -> random.Random:
    """Reproducible stream for one party of a seeded run. Not for production keys."""
    return random.Random(f"{seed}:{label}")


@lru_cache(maxsize=None)
def load_group(name: str) -> GroupParams:
    """Return the shared parameters for a backend name ("bn254", "bls12_381", "ss512")."""
    from .backends import create_backend

    logging.debug(f"Loading pairing backend {name}")
    return GroupParams(create_backend(name))
