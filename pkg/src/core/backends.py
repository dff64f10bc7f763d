"""Concrete pairing backends.

py_ecc provides the asymmetric BN254 and BLS12-381 curves in pure Python.
charm-crypto (optional) provides the symmetric supersingular SS512 curve,
a 160-bit order "Type A" setting with 128-byte elements.
"""

import base64
import logging
from types import ModuleType
from typing import Any, Callable, Dict, List, Sequence, Tuple

from py_ecc import optimized_bls12_381, optimized_bn128

from .errors import DecodeError
from .pairing import GroupKind, PairingBackend


def _to_int(c: Any) -> int:
    return c.n if hasattr(c, "n") else int(c)


class PyEccBackend(PairingBackend):
    """py_ecc optimized curve module (projective points, FQ12 target group)."""

    symmetric = False

    def __init__(self, name: str, curve: ModuleType):
        self.name = name
        self.curve = curve
        self.order = curve.curve_order
        self.field_modulus = curve.field_modulus
        self.fq_size = (self.field_modulus.bit_length() + 7) // 8
        self._sizes = {
            GroupKind.G1: 2 * self.fq_size,
            GroupKind.G2: 4 * self.fq_size,
            GroupKind.GT: 12 * self.fq_size,
        }

    def generator(self, kind: GroupKind) -> Any:
        if kind is GroupKind.G1:
            return self.curve.G1
        if kind is GroupKind.G2:
            return self.curve.G2
        return self.pair(self.curve.G1, self.curve.G2)

    def identity(self, kind: GroupKind) -> Any:
        if kind is GroupKind.G1:
            return self.curve.Z1
        if kind is GroupKind.G2:
            return self.curve.Z2
        return self.curve.FQ12.one()

    def op(self, kind: GroupKind, a: Any, b: Any) -> Any:
        if kind is GroupKind.GT:
            return a * b
        return self.curve.add(a, b)

    def exp(self, kind: GroupKind, a: Any, k: int) -> Any:
        if kind is GroupKind.GT:
            return a ** k
        return self.curve.multiply(a, k)

    def inverse(self, kind: GroupKind, a: Any) -> Any:
        if kind is GroupKind.GT:
            return a.inv()
        return self.curve.neg(a)

    def eq(self, kind: GroupKind, a: Any, b: Any) -> bool:
        if kind is GroupKind.GT:
            return self._coeffs(a) == self._coeffs(b)
        return self.curve.eq(a, b)

    def pair(self, a: Any, b: Any) -> Any:
        # py_ecc takes the G2 point first
        return self.curve.pairing(b, a)

    def pair_product(self, pairs: Sequence[Tuple[Any, Any]]) -> Any:
        acc = self.curve.FQ12.one()
        for a, b in pairs:
            acc = acc * self.curve.pairing(b, a, final_exponentiate=False)
        return self.curve.final_exponentiate(acc)

    def element_size(self, kind: GroupKind) -> int:
        return self._sizes[kind]

    # Encoding: big-endian field elements, affine coordinates, all-zero for infinity

    def _coeffs(self, fqp: Any) -> List[int]:
        """Field coefficients of an FQ2/FQ12 value as reduced ints."""
        return [_to_int(c) % self.field_modulus for c in fqp.coeffs]

    def _pack(self, ints: Sequence[int]) -> bytes:
        return b"".join(i.to_bytes(self.fq_size, "big") for i in ints)

    def _unpack(self, data: bytes) -> List[int]:
        """Split into field-width ints, rejecting any that is not reduced."""
        ints = [
            int.from_bytes(data[i:i + self.fq_size], "big")
            for i in range(0, len(data), self.fq_size)
        ]
        if any(i >= self.field_modulus for i in ints):
            raise DecodeError("coordinate not reduced mod field modulus")
        return ints

    def encode(self, kind: GroupKind, value: Any) -> bytes:
        """Affine coordinates (GT: its twelve coefficients), all zeros for infinity."""
        if kind is GroupKind.GT:
            return self._pack(self._coeffs(value))
        if self.curve.is_inf(value):
            return bytes(self._sizes[kind])
        x, y = self.curve.normalize(value)
        if kind is GroupKind.G1:
            return self._pack([_to_int(x), _to_int(y)])
        return self._pack(self._coeffs(x) + self._coeffs(y))

    def decode(self, kind: GroupKind, data: bytes) -> Any:
        """Validates the encoding down to order-p subgroup membership."""
        if len(data) != self._sizes[kind]:
            raise DecodeError(f"{kind.name} encoding must be {self._sizes[kind]} bytes")
        ints = self._unpack(data)
        curve = self.curve
        if kind is GroupKind.GT:
            value = curve.FQ12(ints)
            if value == curve.FQ12.zero() or value ** self.order != curve.FQ12.one():
                raise DecodeError("GT element outside the order-p subgroup")
            return value
        if not any(ints):
            return self.identity(kind)
        if kind is GroupKind.G1:
            point = (curve.FQ(ints[0]), curve.FQ(ints[1]), curve.FQ.one())
            on_curve = curve.is_on_curve(point, curve.b)
        else:
            point = (curve.FQ2(ints[0:2]), curve.FQ2(ints[2:4]), curve.FQ2.one())
            on_curve = curve.is_on_curve(point, curve.b2)
        if not on_curve:
            raise DecodeError(f"{kind.name} point not on curve")
        if not curve.is_inf(curve.multiply(point, self.order)):
            raise DecodeError(f"{kind.name} point outside the order-p subgroup")
        return point


class CharmBackend(PairingBackend):
    """charm-crypto PairingGroup; symmetric curves map G2 onto G1."""

    def __init__(self, name: str, curve: str):
        try:
            from charm.toolbox import pairinggroup
        except ImportError as e:
            raise ImportError(
                f"backend {name} needs charm-crypto; install with `poetry install -E charm`"
            ) from e
        self._pg = pairinggroup
        self.name = name
        self.group = pairinggroup.PairingGroup(curve)
        self.order = int(self.group.order())
        self.symmetric = curve.startswith("SS")
        self._types = {
            GroupKind.G1: pairinggroup.G1,
            GroupKind.G2: pairinggroup.G1 if self.symmetric else pairinggroup.G2,
            GroupKind.GT: pairinggroup.GT,
        }
        self._generators = {
            GroupKind.G1: self.group.hash(b"offline-euro-g1", self._types[GroupKind.G1]),
            GroupKind.G2: self.group.hash(b"offline-euro-g2", self._types[GroupKind.G2]),
        }
        self._sizes = {kind: len(self.encode(kind, self.generator(kind))) for kind in GroupKind}

    def _zr(self, k: int) -> Any:
        return self.group.init(self._pg.ZR, k)

    def generator(self, kind: GroupKind) -> Any:
        if kind is GroupKind.GT:
            return self.pair(self._generators[GroupKind.G1], self._generators[GroupKind.G2])
        return self._generators[kind]

    def identity(self, kind: GroupKind) -> Any:
        return self.generator(kind) ** self._zr(0)

    def op(self, kind: GroupKind, a: Any, b: Any) -> Any:
        return a * b

    def exp(self, kind: GroupKind, a: Any, k: int) -> Any:
        return a ** self._zr(k)

    def inverse(self, kind: GroupKind, a: Any) -> Any:
        return a ** self._zr(self.order - 1)

    def eq(self, kind: GroupKind, a: Any, b: Any) -> bool:
        return a == b

    def pair(self, a: Any, b: Any) -> Any:
        return self._pg.pair(a, b)

    def element_size(self, kind: GroupKind) -> int:
        return self._sizes[kind]

    def encode(self, kind: GroupKind, value: Any) -> bytes:
        """charm's uncompressed serialization without its type prefix and base64."""
        serialized = self.group.serialize(value, compression=False)
        return base64.b64decode(serialized.split(b":", 1)[1])

    def decode(self, kind: GroupKind, data: bytes) -> Any:
        """charm validates the element; any failure becomes a DecodeError."""
        tag = str(self._types[kind]).encode()
        try:
            return self.group.deserialize(tag + b":" + base64.b64encode(data), compression=False)
        except Exception as e:
            raise DecodeError(f"invalid {kind.name} encoding: {e}") from e


BACKENDS: Dict[str, Callable[[], PairingBackend]] = {
    "bn254": lambda: PyEccBackend("bn254", optimized_bn128),
    "bls12_381": lambda: PyEccBackend("bls12_381", optimized_bls12_381),
    "ss512": lambda: CharmBackend("ss512", "SS512"),
}


def create_backend(name: str) -> PairingBackend:
    """Instantiate the backend registered under `name`."""
    if name not in BACKENDS:
        raise ValueError(f"unknown pairing backend {name!r}; choose from {sorted(BACKENDS)}")
    backend = BACKENDS[name]()
    logging.info(f"Pairing backend {name}: |p|={backend.order.bit_length()} bits, "
                 f"symmetric={backend.symmetric}")
    return backend
