"""Cryptographic core: pairing groups, CRS, signatures, proofs, tokens and storage."""

from .pairing import GroupParams, load_group, pair, extended_pair, default_rng, seeded_rng
from .crs import CommonReferenceString, Trapdoor, generate as generate_crs
from .schnorr import KeyPair, Signature, keygen
from .gsproof import RandomizationElements, ReceiverSecret, TransactionProof, derive_randomization
from .token import DigitalEuro, TransferBundle, WalletEntry, receive_verify, spend, predicted_size
from .ledger import Registry, DepositLedger
from .config import Settings, load_settings
from .errors import EuroError, RejectionReason, TransferRejected

__all__ = [
    'GroupParams',
    'load_group',
    'pair',
    'extended_pair',
    'default_rng',
    'seeded_rng',
    'CommonReferenceString',
    'Trapdoor',
    'generate_crs',
    'KeyPair',
    'Signature',
    'keygen',
    'RandomizationElements',
    'ReceiverSecret',
    'TransactionProof',
    'derive_randomization',
    'DigitalEuro',
    'TransferBundle',
    'WalletEntry',
    'receive_verify',
    'spend',
    'predicted_size',
    'Registry',
    'DepositLedger',
    'Settings',
    'load_settings',
    'EuroError',
    'RejectionReason',
    'TransferRejected'
]
