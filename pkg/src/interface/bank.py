"""Bank: blind issuance at withdrawal, deposit and double-spend detection.

A deposit is a transfer with the bank as receiver. Accepted euros are kept
in the ledger under their dedup key; a second deposit of the same euro is
compared against the stored one instead of overwriting it.
"""

import logging
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Optional, Sequence, Union

from ..core import schnorr
from ..core.crs import CommonReferenceString
from ..core.errors import (
    IdenticalListsError,
    InvalidKeyError,
    ProtocolError,
    RejectionReason,
    TransferRejected,
    UnknownKeyError,
    UnregisteredError,
)
from ..core.gsproof import RandomizationElements, ReceiverSecret, TransactionProof, derive_randomization
from ..core.ledger import DepositLedger, Registry
from ..core.pairing import G1Element, GroupParams, Scalar
from ..core.schnorr import KeyPair, SignerNonce
from ..core.token import TransferBundle, receive_verify
from .ttp import RevocationResult

Revoker = Callable[[TransactionProof, TransactionProof], RevocationResult]


class DepositStatus(Enum):
    ACCEPTED = "accepted"
    DOUBLE_SPEND = "double-spend"
    REJECTED = "rejected"


@dataclass(frozen=True)
class DepositVerdict:
    status: DepositStatus
    identity: Optional[str] = None
    reason: Optional[RejectionReason] = None
    index: Optional[int] = None
    divergence: Optional[int] = None

    def __str__(self) -> str:
        if self.status is DepositStatus.DOUBLE_SPEND:
            return f"double-spend{{{self.identity}}}"
        if self.status is DepositStatus.REJECTED:
            what = self.reason.label if self.reason else "anomaly"
            where = f"[{self.index}]" if self.index is not None else ""
            return f"rejected{{{what}{where}}}"
        return "accepted"


@dataclass(frozen=True)
class RevocationRequest:
    """The two proofs at the divergence index of a forked deposit, awaiting the TTP."""

    key: bytes
    proof_a: TransactionProof
    proof_b: TransactionProof
    divergence: int


def find_divergence(list_a: Sequence[TransactionProof], list_b: Sequence[TransactionProof]) -> int:
    """Smallest index where the two proof lists differ.

    A strict prefix diverges at the shorter length.
    """
    for i, (a, b) in enumerate(zip(list_a, list_b)):
        if a.to_bytes() != b.to_bytes():
            return i
    if len(list_a) != len(list_b):
        return min(len(list_a), len(list_b))
    raise IdenticalListsError("proof lists are identical")


def _same_history(list_a: Sequence[TransactionProof], list_b: Sequence[TransactionProof]) -> bool:
    """Equal once each deposit's own bank-facing proof is dropped."""
    head_a, head_b = list_a[:-1], list_b[:-1]
    return len(head_a) == len(head_b) and all(
        a.to_bytes() == b.to_bytes() for a, b in zip(head_a, head_b)
    )


@dataclass
class BankState:
    params: GroupParams
    crs: CommonReferenceString
    keys: KeyPair
    users: Registry
    ledger: DepositLedger
    revoker: Revoker
    rng: random.Random
    pending: Dict[bytes, ReceiverSecret] = field(default_factory=dict)

    @classmethod
    def create(
        cls,
        params: GroupParams,
        crs: CommonReferenceString,
        revoker: Revoker,
        rng: random.Random,
        registry_path: Optional[str] = None,
        ledger_path: Optional[str] = None,
    ) -> "BankState":
        keys = schnorr.keygen(params, rng)
        ledger = DepositLedger(params, ledger_path)
        # with a ledger file and no registry path, users live in the ledger database
        users = Registry(registry_path) if registry_path or not ledger_path else Registry(conn=ledger.conn)
        return cls(
            params=params,
            crs=crs,
            keys=keys,
            users=users,
            ledger=ledger,
            revoker=revoker,
            rng=rng,
        )

    def __repr__(self) -> str:
        return f"BankState(pk={self.keys.pk!r}, deposits={self.ledger.count()})"

    @property
    def pk(self) -> G1Element:
        return self.keys.pk

    def register_user(self, identity: str, pubkey: G1Element) -> None:
        if pubkey.is_identity():
            raise InvalidKeyError("cannot register the identity element")
        self.users.register(identity, pubkey.to_bytes())
        logging.info(f"Bank registered user {identity}")

    def _require_registered(self, pubkey: G1Element) -> str:
        identity = self.users.lookup(pubkey.to_bytes())
        if identity is None:
            raise UnregisteredError("user is not registered at the bank")
        return identity

    # Withdrawal

    def begin_withdrawal(self, pubkey: G1Element) -> SignerNonce:
        identity = self._require_registered(pubkey)
        nonce = schnorr.blind_round1_signer(self.params, self.rng)
        logging.info(f"Withdrawal opened for {identity}")
        return nonce

    def complete_withdrawal(self, nonce: SignerNonce, c_prime: Scalar) -> Scalar:
        return schnorr.blind_round3_signer(nonce, c_prime, self.keys.sk)

    # Deposit

    def open_deposit(self, pubkey: G1Element) -> RandomizationElements:
        """The bank acts as receiver: hand out fresh randomization for this depositor."""
        self._require_registered(pubkey)
        secret = derive_randomization(self.crs, self.rng)
        self.pending[pubkey.to_bytes()] = secret
        return secret.elements

    def bank_deposit(self, bundle: TransferBundle, depositor: G1Element) -> DepositVerdict:
        outcome = self.check_deposit(bundle, depositor)
        if isinstance(outcome, DepositVerdict):
            return outcome
        return self.settle_revocation(outcome, self.ask_revoker(outcome))

    def check_deposit(
        self, bundle: TransferBundle, depositor: G1Element
    ) -> Union[DepositVerdict, RevocationRequest]:
        """Verify and file a deposit; a forked euro comes back as a pending revocation."""
        depositor_bytes = depositor.to_bytes()
        secret = self.pending.pop(depositor_bytes, None)
        if secret is None:
            raise ProtocolError("no deposit opened for this depositor")
        depositor_identity = self._require_registered(depositor)

        try:
            receive_verify(bundle, secret, self.crs, self.keys.pk)
        except TransferRejected as e:
            logging.warning(f"Deposit by {depositor_identity} rejected: {e}")
            return DepositVerdict(DepositStatus.REJECTED, reason=e.reason, index=e.index)

        euro = bundle.euro
        key = euro.dedup_key()
        prior = self.ledger.get(key)
        if prior is None:
            self.ledger.store(euro, depositor_bytes)
            logging.info(f"Deposit by {depositor_identity} accepted ({len(euro.proofs)} proofs)")
            return DepositVerdict(DepositStatus.ACCEPTED)

        prior_euro, prior_depositor = prior
        if _same_history(prior_euro.proofs, euro.proofs):
            if prior_depositor == depositor_bytes:
                self.ledger.record_incident(key, DepositStatus.DOUBLE_SPEND.value, depositor_identity, None)
                logging.warning(f"Double deposit by {depositor_identity}")
                return DepositVerdict(DepositStatus.DOUBLE_SPEND, identity=depositor_identity)
            return self._anomaly(key, "identical histories from different depositors")

        divergence = find_divergence(prior_euro.proofs, euro.proofs)
        if divergence >= min(len(prior_euro.proofs), len(euro.proofs)):
            return self._anomaly(key, "one proof list is a prefix of the other", divergence)
        return RevocationRequest(key, prior_euro.proofs[divergence], euro.proofs[divergence], divergence)

    def ask_revoker(self, request: RevocationRequest) -> Optional[RevocationResult]:
        """None when the TTP extracts a key nobody registered. Touches no bank state."""
        try:
            return self.revoker(request.proof_a, request.proof_b)
        except UnknownKeyError:
            return None

    def settle_revocation(self, request: RevocationRequest, result: Optional[RevocationResult]) -> DepositVerdict:
        key, divergence = request.key, request.divergence
        if result is None:
            return self._anomaly(key, "revocation extracted an unregistered key", divergence)
        if not result.identified:
            return self._anomaly(key, "revocation found no double spending", divergence)

        self.ledger.record_incident(key, DepositStatus.DOUBLE_SPEND.value, result.identity, divergence)
        logging.warning(f"Double spend at proof {divergence} by {result.identity}")
        return DepositVerdict(DepositStatus.DOUBLE_SPEND, identity=result.identity, divergence=divergence)

    def _anomaly(self, key: bytes, what: str, divergence: Optional[int] = None) -> DepositVerdict:
        logging.warning(f"Deposit anomaly: {what}")
        self.ledger.record_incident(key, "anomaly", None, divergence)
        return DepositVerdict(DepositStatus.REJECTED, divergence=divergence)
