import pytest

from src.core.errors import AlreadySpentError, ProtocolError
from src.core.gsproof import derive_randomization
from src.interface.inproc import bank_withdraw, pay


def test_withdrawal_state_machine(parties):
    _, bank, make_user = parties
    alice = make_user("alice")
    with pytest.raises(ProtocolError):
        alice.finish_withdrawal(1)
    nonce = bank.begin_withdrawal(alice.pk)
    alice.start_withdrawal(nonce.r)
    with pytest.raises(ProtocolError):
        alice.start_withdrawal(nonce.r)


def test_bad_bank_response_is_caught(parties):
    _, bank, make_user = parties
    alice = make_user("alice")
    nonce = bank.begin_withdrawal(alice.pk)
    c_prime = alice.start_withdrawal(nonce.r)
    sigma_prime = bank.complete_withdrawal(nonce, c_prime)
    with pytest.raises(ProtocolError):
        alice.finish_withdrawal(sigma_prime + 1)
    assert alice.wallet == []
    assert alice.withdrawal is None


def test_receive_needs_an_offer(parties, short_chain):
    *_, make_user = parties
    bob = make_user("bob")
    with pytest.raises(ProtocolError):
        bob.user_receive(short_chain.bundles[0])


def test_empty_wallet_cannot_spend(parties, crs, rng):
    *_, make_user = parties
    alice = make_user("alice")
    with pytest.raises(ProtocolError):
        alice.user_spend_to(derive_randomization(crs, rng).elements)


def test_inproc_pay_moves_the_euro(parties):
    _, bank, make_user = parties
    alice, bob = make_user("alice"), make_user("bob")
    bank_withdraw(bank, alice)
    received = pay(alice, bob)
    assert alice.unspent() == []
    assert bob.unspent() == [received]
    assert len(received.euro.proofs) == 1
    assert received.euro.serial_number == alice.wallet[0].euro.serial_number


def test_honest_wallet_refuses_second_spend(parties):
    _, bank, make_user = parties
    alice, bob, carol = make_user("alice"), make_user("bob"), make_user("carol")
    bank_withdraw(bank, alice)
    entry = alice.wallet[0]
    pay(alice, bob, entry)
    with pytest.raises(AlreadySpentError):
        pay(alice, carol, entry)
    # the receiver's offer is still pending, nothing landed
    assert carol.wallet == []
