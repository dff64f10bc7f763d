"""Groth-Sahai commit-and-prove for the single statement e(X, Y) = T.

The spender commits to X = g1^x and Y = g2^y:

    c1 = g1^r    c2 = u^r * X    d1 = g2^s    d2 = v^s * Y

and builds the proof from the receiver's randomization elements
(g2^t, v^t, g1^-t, u^-t):

    theta1 = g1^-t           theta2 = X^s * u^-t
    pi1    = d1^r * g2^t     pi2    = d2^r * v^t

Anyone holding the CRS checks it elementwise with four pairing-product
equations. Targets chain: T_0 = e(g1, g2)^sigma and
T_i = e(g1, g2)^H(T_{i-1}).
"""

import logging
import random
from dataclasses import dataclass, replace
from typing import Optional, Tuple

from .codec import ByteReader
from .crs import CommonReferenceString
from .errors import InvalidKeyError
from .pairing import G1Element, G2Element, GroupKind, GroupParams, GTElement, Scalar


def proof_size(g1_size: int, g2_size: int, gt_size: int) -> int:
    """Bytes of one stored proof: 4|G1| + 4|G2| + |GT|."""
    return 4 * g1_size + 4 * g2_size + gt_size


@dataclass(frozen=True)
class RandomizationElements:
    e_g2t: G2Element
    e_vt: G2Element
    e_g1negt: G1Element
    e_unegt: G1Element

    def check_consistency(self, crs: CommonReferenceString) -> bool:
        """All four elements use one common t, aligned with the CRS u and v."""
        params = crs.params
        g1, g2, u, v = crs.g, crs.h, crs.u, crs.v
        checks = (
            [(self.e_g1negt, g2), (g1, self.e_g2t)],
            [(self.e_unegt, g2), (u, self.e_g2t)],
            [(self.e_g1negt, v), (g1, self.e_vt)],
        )
        return all(params.pair_product(pairs).is_identity() for pairs in checks)

    def to_bytes(self) -> bytes:
        return b"".join(e.to_bytes() for e in (self.e_g2t, self.e_vt, self.e_g1negt, self.e_unegt))

    @classmethod
    def read(cls, reader: ByteReader) -> "RandomizationElements":
        e_g2t, e_vt = reader.g2(), reader.g2()
        e_g1negt, e_unegt = reader.g1(), reader.g1()
        return cls(e_g2t, e_vt, e_g1negt, e_unegt)

    @staticmethod
    def size(params: GroupParams) -> int:
        return 2 * params.element_size(GroupKind.G2) + 2 * params.element_size(GroupKind.G1)


@dataclass(frozen=True)
class ReceiverSecret:
    t: Scalar
    elements: RandomizationElements

    def __repr__(self) -> str:
        return "ReceiverSecret(<hidden>)"


@dataclass(frozen=True)
class TransactionProof:
    c1: G1Element
    c2: G1Element
    d1: G2Element
    d2: G2Element
    theta1: G1Element
    theta2: G1Element
    pi1: G2Element
    pi2: G2Element
    target: Optional[GTElement] = None

    @property
    def params(self) -> GroupParams:
        return self.c1.params

    def with_target(self, target: GTElement) -> "TransactionProof":
        return replace(self, target=target)

    def to_bytes(self) -> bytes:
        if self.target is None:
            raise ValueError("cannot serialize a proof without its target")
        elements = (self.c1, self.c2, self.d1, self.d2, self.theta1, self.theta2,
                    self.pi1, self.pi2, self.target)
        return b"".join(e.to_bytes() for e in elements)

    @classmethod
    def read(cls, reader: ByteReader) -> "TransactionProof":
        c1, c2 = reader.g1(), reader.g1()
        d1, d2 = reader.g2(), reader.g2()
        theta1, theta2 = reader.g1(), reader.g1()
        pi1, pi2 = reader.g2(), reader.g2()
        return cls(c1, c2, d1, d2, theta1, theta2, pi1, pi2, reader.gt())

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams) -> "TransactionProof":
        reader = ByteReader(data, params)
        proof = cls.read(reader)
        reader.done()
        return proof

    @staticmethod
    def size(params: GroupParams) -> int:
        return proof_size(
            params.element_size(GroupKind.G1),
            params.element_size(GroupKind.G2),
            params.element_size(GroupKind.GT),
        )


def derive_randomization(crs: CommonReferenceString, rng: random.Random) -> ReceiverSecret:
    t = crs.params.random_scalar(rng)
    elements = RandomizationElements(
        e_g2t=crs.h ** t,
        e_vt=crs.v ** t,
        e_g1negt=crs.g ** (-t),
        e_unegt=crs.u ** (-t),
    )
    return ReceiverSecret(t, elements)


def prove(
    x: Scalar,
    y: Scalar,
    s: Scalar,
    rand: RandomizationElements,
    crs: CommonReferenceString,
    rng: random.Random,
) -> Tuple[TransactionProof, Scalar]:
    """Commit to g1^x and g2^y and prove e(g1^x, g2^y) = T; returns the proof and r."""
    params = crs.params
    if x % params.order == 0:
        raise InvalidKeyError("spender private key is zero")
    r = params.random_scalar(rng)
    x_commit = crs.g ** x
    c1 = crs.g ** r
    c2 = (crs.u ** r) * x_commit
    d1 = crs.h ** s
    d2 = (crs.v ** s) * (crs.h ** y)
    proof = TransactionProof(
        c1=c1,
        c2=c2,
        d1=d1,
        d2=d2,
        theta1=rand.e_g1negt,
        theta2=(x_commit ** s) * rand.e_unegt,
        pi1=(d1 ** r) * rand.e_g2t,
        pi2=(d2 ** r) * rand.e_vt,
    )
    return proof, r


def verify(proof: TransactionProof, crs: CommonReferenceString) -> bool:
    """Elementwise check of the proof against its stored target."""
    if proof.target is None:
        return False
    params = crs.params
    g1_inv, u_inv = crs.g.inverse(), crs.u.inverse()
    theta1_inv, theta2_inv = proof.theta1.inverse(), proof.theta2.inverse()
    one_equations = (
        [(proof.c1, proof.d1), (g1_inv, proof.pi1), (theta1_inv, crs.h)],
        [(proof.c1, proof.d2), (g1_inv, proof.pi2), (theta1_inv, crs.v)],
        [(proof.c2, proof.d1), (u_inv, proof.pi1), (theta2_inv, crs.h)],
    )
    for index, pairs in enumerate(one_equations):
        if not params.pair_product(pairs).is_identity():
            logging.debug(f"GS equation {index + 1} failed")
            return False
    last = params.pair_product([(proof.c2, proof.d2), (u_inv, proof.pi2), (theta2_inv, crs.v)])
    if last != proof.target:
        logging.debug("GS equation 4 failed")
        return False
    return True


def initial_target(params: GroupParams, sigma: Scalar) -> GTElement:
    return params.gt ** sigma


def next_target(prev: GTElement) -> GTElement:
    params = prev.params
    return params.gt ** params.gt_to_scalar(prev)


def theta_link_holds(theta1: G1Element, d1: G2Element) -> bool:
    """e(g1^-t, g2^s) = e(g1, g2), i.e. s = (-t)^-1."""
    return theta1.params.pair_product([(theta1, d1)]) == theta1.params.gt


def verify_link(prev_proof: TransactionProof, cur_proof: TransactionProof) -> bool:
    if prev_proof.target is None or cur_proof.target is None:
        return False
    if cur_proof.target != next_target(prev_proof.target):
        return False
    return theta_link_holds(prev_proof.theta1, cur_proof.d1)
