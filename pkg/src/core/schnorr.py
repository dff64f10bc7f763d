"""Schnorr signatures over G1 with generator g1.

Plain signing backs the per-transfer theta-signature. The three-round
blind variant backs withdrawal: the bank (signer) sees r, c' and sigma'
but never the message or the final (sigma, c).

Signature check: c == H(g1^sigma * pk^c || M).

Parallel blind sessions are not protected against ROS-style forgeries.
"""

import logging
import random
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .codec import ByteReader
from .errors import ProtocolError
from .pairing import DOMAIN_WITHDRAW, G1Element, GroupParams, Scalar


@dataclass(frozen=True)
class KeyPair:
    sk: Scalar
    pk: G1Element

    def __post_init__(self):
        if self.sk % self.pk.params.order == 0:
            raise ValueError("private key must be nonzero")

    def __repr__(self) -> str:
        return f"KeyPair(pk={self.pk!r})"


@dataclass(frozen=True)
class Signature:
    sigma: Scalar
    c: Scalar

    def to_bytes(self, params: GroupParams) -> bytes:
        return params.encode_scalar(self.sigma) + params.encode_scalar(self.c)

    @classmethod
    def read(cls, reader: ByteReader) -> "Signature":
        return cls(reader.scalar(), reader.scalar())


@dataclass
class SignerNonce:
    """Bank-side state of one blind issuance."""
    k: Scalar
    r: G1Element
    consumed: bool = False

    def __repr__(self) -> str:
        return f"SignerNonce(r={self.r!r}, consumed={self.consumed})"


@dataclass
class BlindSession:
    """Client-side state of one blind issuance."""
    alpha: Scalar
    beta: Scalar
    c: Scalar
    message: bytes
    r_prime: G1Element
    consumed: bool = field(default=False)

    def __repr__(self) -> str:
        return f"BlindSession(c={self.c}, consumed={self.consumed})"


def _challenge(commitment: G1Element, message: bytes, domain: bytes) -> Scalar:
    return commitment.params.hash_to_scalar(commitment.to_bytes() + message, domain)


def keygen(params: GroupParams, rng: random.Random) -> KeyPair:
    sk = params.random_scalar(rng)
    return KeyPair(sk, params.g1 ** sk)


def sign(
    message: bytes,
    sk: Scalar,
    params: GroupParams,
    rng: random.Random,
    domain: bytes = DOMAIN_WITHDRAW,
) -> Signature:
    k = params.random_scalar(rng)
    c = _challenge(params.g1 ** k, message, domain)
    return Signature((k - c * sk) % params.order, c)


def verify(
    message: bytes, sig: Signature, pk: G1Element, domain: bytes = DOMAIN_WITHDRAW
) -> bool:
    params = pk.params
    r_v = (params.g1 ** sig.sigma) * (pk ** sig.c)
    return _challenge(r_v, message, domain) == sig.c % params.order


def blind_round1_signer(params: GroupParams, rng: random.Random) -> SignerNonce:
    """Step 1: the signer commits to a fresh nonce k and sends r = g1^k."""
    k = params.random_scalar(rng)
    return SignerNonce(k, params.g1 ** k)


def blind_round2_client(
    r: G1Element,
    message: bytes,
    pk_signer: G1Element,
    rng: random.Random,
    blinding: Optional[Tuple[Scalar, Scalar]] = None,
    domain: bytes = DOMAIN_WITHDRAW,
) -> Tuple[BlindSession, Scalar]:
    """Steps 2-3: blind r with (alpha, beta) and return the blinded challenge c' = c + beta.

    `blinding` fixes (alpha, beta); (0, 0) reproduces the signer's own view.
    """
    if r.is_identity():
        raise ProtocolError("signer commitment r is the identity")
    params = r.params
    if blinding is None:
        alpha, beta = params.random_scalar(rng), params.random_scalar(rng)
    else:
        alpha, beta = blinding
    r_prime = r * (params.g1 ** (-alpha)) * (pk_signer ** (-beta))
    c = _challenge(r_prime, message, domain)
    session = BlindSession(alpha, beta, c, message, r_prime)
    return session, (c + beta) % params.order


def blind_round3_signer(nonce: SignerNonce, c_prime: Scalar, sk: Scalar) -> Scalar:
    """Step 4: sigma' = k - c' * sk. A nonce answers exactly one challenge."""
    if nonce.consumed:
        raise ProtocolError("signer nonce already used")
    nonce.consumed = True
    sigma_prime = (nonce.k - c_prime * sk) % nonce.r.params.order
    logging.debug("Blind signature round 3 answered")
    return sigma_prime


def unblind(session: BlindSession, sigma_prime: Scalar) -> Signature:
    """Step 5: sigma = sigma' - alpha."""
    if session.consumed:
        raise ProtocolError("blind session already unblinded")
    session.consumed = True
    order = session.r_prime.params.order
    return Signature((sigma_prime - session.alpha) % order, session.c)
