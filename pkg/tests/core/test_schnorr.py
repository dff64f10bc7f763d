import pytest

from src.core import schnorr
from src.core.errors import ProtocolError
from src.core.pairing import DOMAIN_THETA, DOMAIN_WITHDRAW
from src.core.schnorr import KeyPair, Signature


def _blind_issue(params, keys, rng, message, blinding=None):
    nonce = schnorr.blind_round1_signer(params, rng)
    session, c_prime = schnorr.blind_round2_client(nonce.r, message, keys.pk, rng, blinding)
    sigma_prime = schnorr.blind_round3_signer(nonce, c_prime, keys.sk)
    return nonce, session, c_prime, sigma_prime, schnorr.unblind(session, sigma_prime)


def test_sign_and_verify(params, rng):
    keys = schnorr.keygen(params, rng)
    sig = schnorr.sign(b"hello", keys.sk, params, rng)
    assert schnorr.verify(b"hello", sig, keys.pk)
    assert not schnorr.verify(b"hullo", sig, keys.pk)
    assert not schnorr.verify(b"hello", Signature(sig.sigma + 1, sig.c), keys.pk)


def test_signature_is_domain_bound(params, rng):
    keys = schnorr.keygen(params, rng)
    sig = schnorr.sign(b"msg", keys.sk, params, rng, DOMAIN_THETA)
    assert schnorr.verify(b"msg", sig, keys.pk, DOMAIN_THETA)
    assert not schnorr.verify(b"msg", sig, keys.pk, DOMAIN_WITHDRAW)


def test_wrong_key_fails(params, rng):
    keys = schnorr.keygen(params, rng)
    other = schnorr.keygen(params, rng)
    sig = schnorr.sign(b"msg", keys.sk, params, rng)
    assert not schnorr.verify(b"msg", sig, other.pk)


def test_keypair_hides_secret_and_rejects_zero(params, rng):
    keys = schnorr.keygen(params, rng)
    assert str(keys.sk) not in repr(keys)
    with pytest.raises(ValueError):
        KeyPair(0, params.g1)


def test_blind_signature_completeness(params, rng):
    """Every unblinded signature verifies over the hidden message."""
    keys = schnorr.keygen(params, rng)
    for i in range(20):
        message = f"serial-{i}".encode()
        *_, sig = _blind_issue(params, keys, rng, message)
        assert schnorr.verify(message, sig, keys.pk)


def test_zero_blinding_reproduces_signer_view(params, rng):
    """With alpha = beta = 0 the client's (sigma, c) equal the signer's (sigma', c')."""
    keys = schnorr.keygen(params, rng)
    nonce, session, c_prime, sigma_prime, sig = _blind_issue(params, keys, rng, b"m", (0, 0))
    assert session.r_prime == nonce.r
    assert sig.c == c_prime
    assert sig.sigma == sigma_prime
    assert schnorr.verify(b"m", sig, keys.pk)


def test_blinded_transcript_differs_from_signature(params, rng):
    keys = schnorr.keygen(params, rng)
    _, _, c_prime, sigma_prime, sig = _blind_issue(params, keys, rng, b"m")
    assert sig.c != c_prime
    assert sig.sigma != sigma_prime


def test_nonce_answers_once(params, rng):
    keys = schnorr.keygen(params, rng)
    nonce = schnorr.blind_round1_signer(params, rng)
    _, c_prime = schnorr.blind_round2_client(nonce.r, b"m", keys.pk, rng)
    schnorr.blind_round3_signer(nonce, c_prime, keys.sk)
    with pytest.raises(ProtocolError):
        schnorr.blind_round3_signer(nonce, c_prime, keys.sk)


def test_session_unblinds_once(params, rng):
    keys = schnorr.keygen(params, rng)
    _, session, _, sigma_prime, _ = _blind_issue(params, keys, rng, b"m")
    with pytest.raises(ProtocolError):
        schnorr.unblind(session, sigma_prime)


def test_identity_commitment_is_refused(params, rng):
    keys = schnorr.keygen(params, rng)
    with pytest.raises(ProtocolError):
        schnorr.blind_round2_client(params.g1 ** 0, b"m", keys.pk, rng)


def test_signature_encoding(params, rng):
    keys = schnorr.keygen(params, rng)
    sig = schnorr.sign(b"m", keys.sk, params, rng)
    data = sig.to_bytes(params)
    assert len(data) == 2 * params.scalar_size
    assert data[:32] == params.encode_scalar(sig.sigma)


@pytest.mark.slow
def test_blind_signature_completeness_hundred(params, rng):
    keys = schnorr.keygen(params, rng)
    for i in range(100):
        message = i.to_bytes(32, "big")
        *_, sig = _blind_issue(params, keys, rng, message)
        assert schnorr.verify(message, sig, keys.pk)
