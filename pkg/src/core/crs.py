"""Common reference string and trapdoor.

The CRS publishes eight elements: g = g1, u = g1^alpha, g', u' in G1 and
h = g2, v = g2^beta, h', v' in G2. Only the TTP keeps the trapdoor
(alpha, beta), which opens any commitment made against u or v.

The primed elements are drawn and published but no equation of the
protocol consumes them.
"""

import logging
import random
from dataclasses import dataclass
from typing import Tuple

from .codec import ByteReader, pack_str
from .errors import DecodeError, ParameterMismatchError
from .pairing import G1Element, G2Element, GroupParams, Scalar


@dataclass(frozen=True)
class Trapdoor:
    alpha: Scalar
    beta: Scalar

    def __post_init__(self):
        if self.alpha == 0 or self.beta == 0:
            raise ValueError("trapdoor exponents must be nonzero")

    def __repr__(self) -> str:
        return "Trapdoor(<hidden>)"


@dataclass(frozen=True)
class CommonReferenceString:
    params: GroupParams
    g: G1Element
    u: G1Element
    g_prime: G1Element
    u_prime: G1Element
    h: G2Element
    v: G2Element
    h_prime: G2Element
    v_prime: G2Element

    def __post_init__(self):
        for name in ("g", "u", "g_prime", "u_prime", "h", "v", "h_prime", "v_prime"):
            element = getattr(self, name)
            if element.params is not self.params:
                raise ParameterMismatchError(f"CRS element {name} from other parameters")
            if element.is_identity():
                raise ValueError(f"CRS element {name} is the identity")

    @property
    def g1_elements(self) -> Tuple[G1Element, ...]:
        return (self.g, self.u, self.g_prime, self.u_prime)

    @property
    def g2_elements(self) -> Tuple[G2Element, ...]:
        return (self.h, self.v, self.h_prime, self.v_prime)

    def to_bytes(self) -> bytes:
        """params-id string, then g, u, g', u', h, v, h', v'."""
        body = b"".join(e.to_bytes() for e in self.g1_elements + self.g2_elements)
        return pack_str(self.params.params_id) + body

    @classmethod
    def read(cls, reader: ByteReader) -> "CommonReferenceString":
        params_id = reader.string()
        if params_id != reader.params.params_id:
            raise ParameterMismatchError(
                f"CRS built for {params_id}, reader expects {reader.params.params_id}"
            )
        g, u, g_prime, u_prime = reader.many(4, ByteReader.g1)
        h, v, h_prime, v_prime = reader.many(4, ByteReader.g2)
        try:
            return cls(reader.params, g, u, g_prime, u_prime, h, v, h_prime, v_prime)
        except ValueError as e:
            raise DecodeError(str(e)) from e

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams) -> "CommonReferenceString":
        reader = ByteReader(data, params)
        crs = cls.read(reader)
        reader.done()
        return crs


def generate(params: GroupParams, rng: random.Random) -> Tuple[CommonReferenceString, Trapdoor]:
    """Draw a fresh CRS. random_scalar never returns zero, so no redraw loop is needed."""
    alpha = params.random_scalar(rng)
    beta = params.random_scalar(rng)
    crs = CommonReferenceString(
        params=params,
        g=params.g1,
        u=params.g1 ** alpha,
        g_prime=params.g1 ** params.random_scalar(rng),
        u_prime=params.g1 ** params.random_scalar(rng),
        h=params.g2,
        v=params.g2 ** beta,
        h_prime=params.g2 ** params.random_scalar(rng),
        v_prime=params.g2 ** params.random_scalar(rng),
    )
    logging.info(f"Generated CRS over {params.params_id}")
    return crs, Trapdoor(alpha, beta)


def extract_committed_g1(c1: G1Element, c2: G1Element, alpha: Scalar) -> G1Element:
    """Open (c1, c2) = (g1^r, u^r * X) to X."""
    return (c1 ** (-alpha)) * c2


def extract_committed_g2(d1: G2Element, d2: G2Element, beta: Scalar) -> G2Element:
    """Open (d1, d2) = (g2^s, v^s * Y) to Y."""
    return (d1 ** (-beta)) * d2


def trapdoor_to_bytes(trapdoor: Trapdoor, params: GroupParams) -> bytes:
    return params.encode_scalar(trapdoor.alpha) + params.encode_scalar(trapdoor.beta)


def trapdoor_from_bytes(data: bytes, params: GroupParams) -> Trapdoor:
    reader = ByteReader(data, params)
    alpha, beta = reader.scalar(), reader.scalar()
    reader.done()
    try:
        return Trapdoor(alpha, beta)
    except ValueError as e:
        raise DecodeError(str(e)) from e
