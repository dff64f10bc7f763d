from dataclasses import replace

import pytest

from src.core import gsproof, schnorr, token
from src.core.codec import pack_u32
from src.core.errors import AlreadySpentError, DecodeError, RejectionReason, TransferRejected, TruncatedError
from src.core.gsproof import RandomizationElements
from src.core.schnorr import Signature
from src.core.token import DigitalEuro, TransferBundle, WalletEntry


def _reject_reason(bundle, secret, chain):
    with pytest.raises(TransferRejected) as info:
        token.receive_verify(bundle, secret, chain.crs, chain.bank_pk)
    return info.value.reason, info.value.index


def test_withdrawal_prepare(params, rng):
    request = token.withdrawal_prepare(params, rng)
    assert len(request.serial_number) == token.SERIAL_NUMBER_BYTES
    assert request.theta1_w == params.g1 ** (-request.t0)
    assert request.message == request.serial_number + request.theta1_w.to_bytes()


def test_withdrawn_euro_carries_valid_bank_signature(withdrawn, bank_keys):
    euro = withdrawn.euro
    assert euro.proofs == ()
    assert schnorr.verify(euro.message, euro.bank_sig, bank_keys.pk)


def test_serial_number_length_enforced(withdrawn):
    with pytest.raises(ValueError):
        replace(withdrawn.euro, serial_number=b"short")


def test_serialized_size_matches_prediction(params, short_chain):
    """Actual size is the prediction plus the proof-count field."""
    for n, bundle in enumerate(short_chain.bundles, start=1):
        size = len(token.serialize_euro(bundle.euro))
        assert size == token.predicted_size(n, params) + token.COUNT_FIELD_BYTES
    assert token.predicted_size(1, params) == 32 + 64 + 64 + 1152


def test_euro_codec(params, short_chain):
    euro = short_chain.bundles[-1].euro
    assert token.deserialize_euro(token.serialize_euro(euro), params) == euro
    with pytest.raises(DecodeError):
        token.deserialize_euro(token.serialize_euro(euro) + b"\x00", params)


def test_euro_decode_rejects_oversized_count(params, short_chain):
    euro = short_chain.bundles[0].euro
    head = euro.serial_number + euro.theta1_w.to_bytes() + euro.bank_sig.to_bytes(params)
    with pytest.raises(TruncatedError):
        token.deserialize_euro(head + pack_u32(1000) + euro.proofs[0].to_bytes(), params)


def test_bundle_codec(params, short_chain):
    for bundle in short_chain.bundles:
        assert TransferBundle.from_bytes(bundle.to_bytes(), params) == bundle
    assert short_chain.bundles[0].prev_theta_sig is None
    assert short_chain.bundles[1].prev_theta_sig is not None


def test_bundle_decode_rejects_bad_flag(params, short_chain):
    bundle = short_chain.bundles[0]
    data = bytearray(bundle.to_bytes())
    flag_at = len(token.serialize_euro(bundle.euro)) + 2 * 128
    assert data[flag_at] == 0
    data[flag_at] = 2
    with pytest.raises(DecodeError):
        TransferBundle.from_bytes(bytes(data), params)


def test_dedup_key_survives_transfers(short_chain):
    first, second = (b.euro for b in short_chain.bundles)
    assert first.dedup_key() == second.dedup_key()
    assert len(first.dedup_key()) == 32


def test_honest_chain_verifies(short_chain):
    for bundle, secret in zip(short_chain.bundles, short_chain.secrets):
        entry = token.receive_verify(bundle, secret, short_chain.crs, short_chain.bank_pk)
        assert entry.euro == bundle.euro
        assert entry.t_secret == secret.t
        assert entry.theta_sig_held == bundle.cur_theta_sig
        assert not entry.spent


def test_empty_chain_rejected(short_chain):
    bundle = short_chain.bundles[0]
    empty = replace(bundle, euro=replace(bundle.euro, proofs=()))
    assert _reject_reason(empty, short_chain.secrets[0], short_chain) == (RejectionReason.EMPTY_CHAIN, None)


def test_bad_bank_signature_rejected(short_chain):
    bundle = short_chain.bundles[0]
    sig = bundle.euro.bank_sig
    forged = replace(bundle, euro=replace(bundle.euro, bank_sig=Signature(sig.sigma + 1, sig.c)))
    assert _reject_reason(forged, short_chain.secrets[0], short_chain)[0] is RejectionReason.BAD_BANK_SIG


def test_bad_proof_rejected_with_index(short_chain):
    bundle = short_chain.bundles[1]
    proofs = list(bundle.euro.proofs)
    proofs[0] = replace(proofs[0], pi1=proofs[0].pi1 * short_chain.params.g2)
    tampered = replace(bundle, euro=replace(bundle.euro, proofs=tuple(proofs)))
    assert _reject_reason(tampered, short_chain.secrets[1], short_chain) == (RejectionReason.BAD_PROOF, 0)


def test_random_s_breaks_the_link(short_chain, rng):
    """A holder who spends with a wrong t produces a valid proof that does not link."""
    chain = short_chain
    params = chain.params
    held = WalletEntry.from_bundle(chain.bundles[0], chain.secrets[0])
    forged = replace(held, t_secret=params.random_scalar(rng))
    receiver = gsproof.derive_randomization(chain.crs, rng)
    bundle = token.spend(forged, schnorr.keygen(params, rng), receiver.elements, chain.crs, rng)
    assert gsproof.verify(bundle.euro.proofs[-1], chain.crs)
    assert _reject_reason(bundle, receiver, chain) == (RejectionReason.BROKEN_LINK, 1)


def test_wrong_first_target_breaks_the_link(short_chain, rng):
    """Proving against a different sigma gives a valid proof with the wrong initial target."""
    chain = short_chain
    params = chain.params
    euro = replace(chain.bundles[0].euro, proofs=())
    sig = euro.bank_sig
    entry = WalletEntry(replace(euro, bank_sig=Signature((sig.sigma + 1) % params.order, sig.c)), 1)
    receiver = gsproof.derive_randomization(chain.crs, rng)
    bundle = token.spend(entry, schnorr.keygen(params, rng), receiver.elements, chain.crs, rng)
    bundle = replace(bundle, euro=replace(bundle.euro, bank_sig=sig))
    assert gsproof.verify(bundle.euro.proofs[0], chain.crs)
    assert _reject_reason(bundle, receiver, chain) == (RejectionReason.BROKEN_LINK, 0)


def test_foreign_randomization_rejected(short_chain, rng):
    stranger = gsproof.derive_randomization(short_chain.crs, rng)
    reason, _ = _reject_reason(short_chain.bundles[0], stranger, short_chain)
    assert reason is RejectionReason.FOREIGN_RANDOMIZATION


def test_bad_d2_rejected(short_chain):
    bundle = short_chain.bundles[0]
    tampered = replace(bundle, y_commit=bundle.y_commit * short_chain.params.g2)
    reason, _ = _reject_reason(tampered, short_chain.secrets[0], short_chain)
    assert reason is RejectionReason.BAD_D2


def test_bad_theta_signature_rejected(short_chain):
    bundle = short_chain.bundles[0]
    sig = bundle.cur_theta_sig
    tampered = replace(bundle, cur_theta_sig=Signature(sig.sigma + 1, sig.c))
    reason, _ = _reject_reason(tampered, short_chain.secrets[0], short_chain)
    assert reason is RejectionReason.BAD_THETA_SIG


def test_missing_prev_theta_signature_rejected(short_chain):
    bundle = replace(short_chain.bundles[1], prev_theta_sig=None)
    reason, _ = _reject_reason(bundle, short_chain.secrets[1], short_chain)
    assert reason is RejectionReason.BAD_PREV_THETA_SIG


def test_spend_leaves_entry_unspent(short_chain, rng):
    chain = short_chain
    entry = WalletEntry.from_bundle(chain.bundles[-1], chain.secrets[-1])
    receiver = gsproof.derive_randomization(chain.crs, rng)
    bundle = token.spend(entry, schnorr.keygen(chain.params, rng), receiver.elements, chain.crs, rng)
    assert not entry.spent
    assert entry.r_used is not None
    assert len(bundle.euro.proofs) == len(entry.euro.proofs) + 1
    assert bundle.prev_theta_sig == entry.theta_sig_held
    assert bundle.euro.proofs[-1].c1 == chain.params.g1 ** entry.r_used


def test_spent_entry_is_refused(withdrawn, crs, rng, params):
    withdrawn.mark_spent()
    receiver = gsproof.derive_randomization(crs, rng)
    with pytest.raises(AlreadySpentError):
        token.spend(withdrawn, schnorr.keygen(params, rng), receiver.elements, crs, rng)


def test_malformed_randomization_refused(withdrawn, crs, rng, params):
    a = gsproof.derive_randomization(crs, rng).elements
    b = gsproof.derive_randomization(crs, rng).elements
    mixed = RandomizationElements(a.e_g2t, b.e_vt, a.e_g1negt, a.e_unegt)
    with pytest.raises(TransferRejected) as info:
        token.spend(withdrawn, schnorr.keygen(params, rng), mixed, crs, rng)
    assert info.value.reason is RejectionReason.MALFORMED_RANDOMIZATION


def test_withdrawn_entry_spends_and_verifies(withdrawn, crs, rng, params, bank_keys):
    receiver = gsproof.derive_randomization(crs, rng)
    bundle = token.spend(withdrawn, schnorr.keygen(params, rng), receiver.elements, crs, rng)
    entry = token.receive_verify(bundle, receiver, crs, bank_keys.pk)
    assert len(entry.euro.proofs) == 1
    assert entry.euro.proofs[0].target == gsproof.initial_target(params, withdrawn.euro.bank_sig.sigma)


def test_last_theta1(withdrawn, short_chain):
    assert withdrawn.last_theta1 == withdrawn.euro.theta1_w
    entry = WalletEntry.from_bundle(short_chain.bundles[0], short_chain.secrets[0])
    assert entry.last_theta1 == short_chain.secrets[0].elements.e_g1negt


def test_digital_euro_append_is_persistent(short_chain):
    euro = short_chain.bundles[0].euro
    longer = euro.append(short_chain.bundles[1].euro.proofs[-1])
    assert len(euro.proofs) == 1
    assert len(longer.proofs) == 2
    assert isinstance(longer, DigitalEuro)
