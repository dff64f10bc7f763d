"""The digital euro, its transfer bundle and the holder-side wallet entry.

A euro is (SN, theta1_w, bank signature, proofs). Each transfer appends one
Groth-Sahai proof; the receiver re-verifies the full list, every link of the
target chain and both theta-signatures before accepting.

Euro layout: SN (32) | theta1_w | sigma | c | count u32 | proofs, each proof
being c1 c2 d1 d2 theta1 theta2 pi1 pi2 T in canonical fixed width.
"""

import hashlib
import logging
import random
from dataclasses import dataclass, field, replace
from typing import Optional, Tuple

from . import gsproof, schnorr
from .codec import ByteReader, pack_u8, pack_u32
from .crs import CommonReferenceString
from .errors import (
    AlreadySpentError,
    DecodeError,
    RejectionReason,
    TransferRejected,
    TruncatedError,
)
from .gsproof import RandomizationElements, ReceiverSecret, TransactionProof
from .pairing import (
    DOMAIN_THETA,
    DOMAIN_WITHDRAW,
    G1Element,
    G2Element,
    GroupKind,
    GroupParams,
    Scalar,
)
from .schnorr import KeyPair, Signature

SERIAL_NUMBER_BYTES = 32
COUNT_FIELD_BYTES = 4


def withdrawal_message(serial_number: bytes, theta1_w: G1Element) -> bytes:
    return serial_number + theta1_w.to_bytes()


@dataclass(frozen=True)
class DigitalEuro:
    serial_number: bytes
    theta1_w: G1Element
    bank_sig: Signature
    proofs: Tuple[TransactionProof, ...] = ()

    def __post_init__(self):
        if len(self.serial_number) != SERIAL_NUMBER_BYTES:
            raise ValueError(f"serial number must be {SERIAL_NUMBER_BYTES} bytes")
        if not isinstance(self.proofs, tuple):
            object.__setattr__(self, "proofs", tuple(self.proofs))

    @property
    def params(self) -> GroupParams:
        return self.theta1_w.params

    @property
    def message(self) -> bytes:
        return withdrawal_message(self.serial_number, self.theta1_w)

    def append(self, proof: TransactionProof) -> "DigitalEuro":
        return replace(self, proofs=self.proofs + (proof,))

    def dedup_key(self) -> bytes:
        """Ledger key: SHA-256 over SN | theta1_w | sigma | c."""
        return hashlib.sha256(self.message + self.bank_sig.to_bytes(self.params)).digest()

    def to_bytes(self) -> bytes:
        return serialize_euro(self)

    @classmethod
    def read(cls, reader: ByteReader) -> "DigitalEuro":
        serial_number = reader.take(SERIAL_NUMBER_BYTES)
        theta1_w = reader.g1()
        bank_sig = Signature.read(reader)
        count = reader.u32()
        # a truncated count would otherwise allocate before failing
        if count * TransactionProof.size(reader.params) > reader.remaining:
            raise TruncatedError(f"euro declares {count} proofs but only {reader.remaining} bytes remain")
        proofs = reader.many(count, TransactionProof.read)
        return cls(serial_number, theta1_w, bank_sig, tuple(proofs))


@dataclass(frozen=True)
class TransferBundle:
    """What a spender sends: the grown euro, Y, v^s and both theta-signatures.

    The constructor does not enforce v^s * Y == d2 or a non-empty chain;
    receive_verify rejects those with a named reason.
    """
    euro: DigitalEuro
    y_commit: G2Element
    vs_commit: G2Element
    prev_theta_sig: Optional[Signature]
    cur_theta_sig: Signature

    def to_bytes(self) -> bytes:
        params = self.euro.params
        absent = Signature(0, 0)
        return b"".join([
            serialize_euro(self.euro),
            self.y_commit.to_bytes(),
            self.vs_commit.to_bytes(),
            pack_u8(1 if self.prev_theta_sig is not None else 0),
            (self.prev_theta_sig or absent).to_bytes(params),
            self.cur_theta_sig.to_bytes(params),
        ])

    @classmethod
    def read(cls, reader: ByteReader) -> "TransferBundle":
        euro = DigitalEuro.read(reader)
        y_commit, vs_commit = reader.g2(), reader.g2()
        has_prev = reader.u8()
        if has_prev not in (0, 1):
            raise DecodeError(f"invalid prev-signature flag {has_prev}")
        prev = Signature.read(reader)
        cur = Signature.read(reader)
        return cls(euro, y_commit, vs_commit, prev if has_prev else None, cur)

    @classmethod
    def from_bytes(cls, data: bytes, params: GroupParams) -> "TransferBundle":
        reader = ByteReader(data, params)
        bundle = cls.read(reader)
        reader.done()
        return bundle


@dataclass
class WalletEntry:
    """One euro held by a user, with the secrets needed to spend it."""
    euro: DigitalEuro
    t_secret: Scalar
    theta_sig_held: Optional[Signature] = None
    r_used: Optional[Scalar] = None
    spent: bool = False

    @classmethod
    def from_bundle(cls, bundle: TransferBundle, secret: ReceiverSecret) -> "WalletEntry":
        return cls(bundle.euro, secret.t, bundle.cur_theta_sig)

    @property
    def last_theta1(self) -> G1Element:
        if self.euro.proofs:
            return self.euro.proofs[-1].theta1
        return self.euro.theta1_w

    def mark_spent(self) -> None:
        self.spent = True

    def __repr__(self) -> str:
        return (f"WalletEntry(sn={self.euro.serial_number.hex()[:12]}, "
                f"proofs={len(self.euro.proofs)}, spent={self.spent})")


@dataclass(frozen=True)
class WithdrawalRequest:
    serial_number: bytes
    t0: Scalar = field(repr=False)
    theta1_w: G1Element
    message: bytes


def withdrawal_prepare(params: GroupParams, rng: random.Random) -> WithdrawalRequest:
    serial_number = rng.randbytes(SERIAL_NUMBER_BYTES)
    t0 = params.random_scalar(rng)
    theta1_w = params.g1 ** (-t0)
    return WithdrawalRequest(serial_number, t0, theta1_w, withdrawal_message(serial_number, theta1_w))


def spend(
    entry: WalletEntry,
    spender_keys: KeyPair,
    rand: RandomizationElements,
    crs: CommonReferenceString,
    rng: random.Random,
    allow_double_spend: bool = False,
) -> TransferBundle:
    """Append a proof for the receiver's randomization and build the bundle.

    The entry is not marked spent here; callers do that once the receiver
    acknowledged the bundle.
    """
    if entry.spent and not allow_double_spend:
        logging.warning(f"Refusing to spend {entry!r} twice")
        raise AlreadySpentError("wallet entry already spent")
    if not rand.check_consistency(crs):
        raise TransferRejected(RejectionReason.MALFORMED_RANDOMIZATION)

    params = crs.params
    euro = entry.euro
    if euro.proofs:
        prev_target = euro.proofs[-1].target
        assert prev_target is not None
        k = params.gt_to_scalar(prev_target)
        target = gsproof.next_target(prev_target)
    else:
        k = euro.bank_sig.sigma
        target = gsproof.initial_target(params, k)

    x = spender_keys.sk
    y = k * params.inverse_scalar(x) % params.order
    s = params.inverse_scalar(-entry.t_secret)
    proof, r = gsproof.prove(x, y, s, rand, crs, rng)
    proof = proof.with_target(target)

    cur_theta_sig = schnorr.sign(rand.e_g1negt.to_bytes(), r, params, rng, DOMAIN_THETA)
    entry.r_used = r
    return TransferBundle(
        euro=euro.append(proof),
        y_commit=crs.h ** y,
        vs_commit=crs.v ** s,
        prev_theta_sig=entry.theta_sig_held,
        cur_theta_sig=cur_theta_sig,
    )


def _reject(reason: RejectionReason, index: Optional[int] = None) -> TransferRejected:
    error = TransferRejected(reason, index)
    logging.warning(f"Transfer rejected: {error}")
    return error


def receive_verify(
    bundle: TransferBundle,
    secret: ReceiverSecret,
    crs: CommonReferenceString,
    bank_pk: G1Element,
) -> WalletEntry:
    """Check a received bundle end to end; raises TransferRejected naming the failed check."""
    euro = bundle.euro
    proofs = euro.proofs
    params = crs.params
    if not proofs:
        raise _reject(RejectionReason.EMPTY_CHAIN)

    if not schnorr.verify(euro.message, euro.bank_sig, bank_pk, DOMAIN_WITHDRAW):
        raise _reject(RejectionReason.BAD_BANK_SIG)

    for i, proof in enumerate(proofs):
        if not gsproof.verify(proof, crs):
            raise _reject(RejectionReason.BAD_PROOF, i)

    first = proofs[0]
    if (first.target != gsproof.initial_target(params, euro.bank_sig.sigma)
            or not gsproof.theta_link_holds(euro.theta1_w, first.d1)):
        raise _reject(RejectionReason.BROKEN_LINK, 0)
    for i in range(1, len(proofs)):
        if not gsproof.verify_link(proofs[i - 1], proofs[i]):
            raise _reject(RejectionReason.BROKEN_LINK, i)

    last = proofs[-1]
    if last.theta1 != crs.g ** (-secret.t):
        raise _reject(RejectionReason.FOREIGN_RANDOMIZATION)
    if last.d2 != bundle.vs_commit * bundle.y_commit:
        raise _reject(RejectionReason.BAD_D2)
    if not schnorr.verify(last.theta1.to_bytes(), bundle.cur_theta_sig, last.c1, DOMAIN_THETA):
        raise _reject(RejectionReason.BAD_THETA_SIG)
    if len(proofs) >= 2:
        prev = proofs[-2]
        if bundle.prev_theta_sig is None or not schnorr.verify(
            prev.theta1.to_bytes(), bundle.prev_theta_sig, prev.c1, DOMAIN_THETA
        ):
            raise _reject(RejectionReason.BAD_PREV_THETA_SIG)

    return WalletEntry.from_bundle(bundle, secret)


def serialize_euro(euro: DigitalEuro) -> bytes:
    params = euro.params
    parts = [
        euro.serial_number,
        euro.theta1_w.to_bytes(),
        euro.bank_sig.to_bytes(params),
        pack_u32(len(euro.proofs)),
    ]
    parts.extend(proof.to_bytes() for proof in euro.proofs)
    return b"".join(parts)


def deserialize_euro(data: bytes, params: GroupParams) -> DigitalEuro:
    reader = ByteReader(data, params)
    euro = DigitalEuro.read(reader)
    reader.done()
    return euro


def predicted_size(n: int, params: GroupParams) -> int:
    """|SN| + |G1| + |(sigma, c)| + n * (4|G1| + 4|G2| + |GT|).

    serialize_euro adds COUNT_FIELD_BYTES on top of this.
    """
    return (
        SERIAL_NUMBER_BYTES
        + params.element_size(GroupKind.G1)
        + 2 * params.scalar_size
        + n * TransactionProof.size(params)
    )

