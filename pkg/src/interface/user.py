"""User wallet orchestration on top of the token module."""

import logging
import random
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from ..core import schnorr, token
from ..core.crs import CommonReferenceString
from ..core.errors import ProtocolError
from ..core.gsproof import RandomizationElements, ReceiverSecret, derive_randomization
from ..core.pairing import G1Element, GroupParams, Scalar
from ..core.schnorr import BlindSession, KeyPair
from ..core.token import DigitalEuro, TransferBundle, WalletEntry, WithdrawalRequest


@dataclass
class UserState:
    identity: str
    params: GroupParams
    crs: CommonReferenceString
    bank_pk: G1Element
    keys: KeyPair
    rng: random.Random
    wallet: List[WalletEntry] = field(default_factory=list)
    withdrawal: Optional[Tuple[BlindSession, WithdrawalRequest]] = None
    pending_receive: Optional[ReceiverSecret] = None

    @classmethod
    def create(
        cls,
        identity: str,
        params: GroupParams,
        crs: CommonReferenceString,
        bank_pk: G1Element,
        rng: random.Random,
    ) -> "UserState":
        return cls(identity, params, crs, bank_pk, schnorr.keygen(params, rng), rng)

    def __repr__(self) -> str:
        return f"UserState({self.identity!r}, wallet={len(self.wallet)})"

    @property
    def pk(self) -> G1Element:
        return self.keys.pk

    def unspent(self) -> List[WalletEntry]:
        return [entry for entry in self.wallet if not entry.spent]

    # Withdrawal

    def start_withdrawal(self, r: G1Element) -> Scalar:
        """Answer the bank's nonce commitment with a blinded challenge."""
        if self.withdrawal is not None:
            raise ProtocolError("a withdrawal is already open")
        request = token.withdrawal_prepare(self.params, self.rng)
        session, c_prime = schnorr.blind_round2_client(r, request.message, self.bank_pk, self.rng)
        self.withdrawal = (session, request)
        return c_prime

    def finish_withdrawal(self, sigma_prime: Scalar) -> WalletEntry:
        if self.withdrawal is None:
            raise ProtocolError("no withdrawal in progress")
        session, request = self.withdrawal
        self.withdrawal = None
        bank_sig = schnorr.unblind(session, sigma_prime)
        if not schnorr.verify(request.message, bank_sig, self.bank_pk):
            raise ProtocolError("bank signature does not verify after unblinding")
        euro = DigitalEuro(request.serial_number, request.theta1_w, bank_sig)
        entry = WalletEntry(euro, request.t0)
        self.wallet.append(entry)
        logging.info(f"{self.identity} withdrew a euro")
        return entry

    # Transfer

    def offer_randomization(self) -> RandomizationElements:
        """Receiver side, first leg: fresh t, elements go to the spender."""
        self.pending_receive = derive_randomization(self.crs, self.rng)
        return self.pending_receive.elements

    def user_receive(self, bundle: TransferBundle) -> WalletEntry:
        secret = self.pending_receive
        if secret is None:
            raise ProtocolError("no randomization offered for this transfer")
        self.pending_receive = None
        entry = token.receive_verify(bundle, secret, self.crs, self.bank_pk)
        self.wallet.append(entry)
        logging.info(f"{self.identity} accepted a euro with {len(entry.euro.proofs)} proofs")
        return entry

    def user_spend_to(
        self,
        rand: RandomizationElements,
        entry: Optional[WalletEntry] = None,
        allow_double_spend: bool = False,
    ) -> Tuple[WalletEntry, TransferBundle]:
        """Spend `entry` (default: oldest unspent) to whoever sent `rand`.

        The entry stays unspent until mark_spent is called after the ACK.
        """
        if entry is None:
            unspent = self.unspent()
            if not unspent:
                raise ProtocolError(f"{self.identity} holds no unspent euro")
            entry = unspent[0]
        bundle = token.spend(entry, self.keys, rand, self.crs, self.rng, allow_double_spend)
        return entry, bundle

    def mark_spent(self, entry: WalletEntry) -> None:
        entry.mark_spent()
        logging.info(f"{self.identity} spent a euro")
