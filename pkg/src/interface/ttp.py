"""Trusted third party: parameter setup, registration and anonymity revocation.

The TTP never takes part in a transfer. Revocation sees exactly two proofs
and opens only their spender commitments.
"""

import logging
import random
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from ..core import crs as crs_module
from ..core.crs import CommonReferenceString, Trapdoor
from ..core.errors import InvalidKeyError, UnknownKeyError
from ..core.gsproof import TransactionProof
from ..core.ledger import Registry
from ..core.pairing import G1Element, GroupParams


# Registering under this identity also publishes the key as the bank key
BANK_IDENTITY = "bank"


class RevocationVerdict(Enum):
    IDENTIFIED = "identified"
    NOT_DOUBLE_SPEND = "not-double-spend"


@dataclass(frozen=True)
class RevocationResult:
    verdict: RevocationVerdict
    identity: Optional[str] = None

    @property
    def identified(self) -> bool:
        return self.verdict is RevocationVerdict.IDENTIFIED


@dataclass
class TtpState:
    params: GroupParams
    crs: CommonReferenceString
    trapdoor: Trapdoor
    registry: Registry
    bank_pk: Optional[G1Element] = None

    @classmethod
    def setup(
        cls, params: GroupParams, rng: random.Random, registry_path: Optional[str] = None
    ) -> "TtpState":
        crs, trapdoor = crs_module.generate(params, rng)
        return cls(params, crs, trapdoor, Registry(registry_path))

    def __repr__(self) -> str:
        return f"TtpState(params={self.params.params_id}, registered={self.registry.count()})"

    def register(self, identity: str, pubkey: G1Element) -> None:
        if pubkey.is_identity():
            raise InvalidKeyError("cannot register the identity element")
        self.registry.register(identity, pubkey.to_bytes())
        if identity == BANK_IDENTITY:
            self.bank_pk = pubkey
        logging.info(f"TTP registered {identity}")

    def lookup(self, pubkey: G1Element) -> Optional[str]:
        return self.registry.lookup(pubkey.to_bytes())

    def revoke(self, proof_a: TransactionProof, proof_b: TransactionProof) -> RevocationResult:
        """Open the spender key of both proofs; equal keys name the double spender."""
        alpha = self.trapdoor.alpha
        x_a = crs_module.extract_committed_g1(proof_a.c1, proof_a.c2, alpha)
        x_b = crs_module.extract_committed_g1(proof_b.c1, proof_b.c2, alpha)
        if x_a != x_b:
            logging.info("Revocation: proofs come from different spenders")
            return RevocationResult(RevocationVerdict.NOT_DOUBLE_SPEND)
        identity = self.lookup(x_a)
        if identity is None:
            logging.warning("Revocation: extracted key is not registered")
            raise UnknownKeyError("extracted public key not in registry")
        logging.info(f"Revocation: double spender is {identity}")
        return RevocationResult(RevocationVerdict.IDENTIFIED, identity)
