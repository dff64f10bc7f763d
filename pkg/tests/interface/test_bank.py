from dataclasses import replace

import pytest

from src.core.errors import IdenticalListsError, ProtocolError, RejectionReason, UnregisteredError
from src.core.pairing import seeded_rng
from src.core.schnorr import Signature
from src.interface.bank import BankState, DepositStatus, DepositVerdict, find_divergence
from src.interface.inproc import bank_withdraw, pay, user_deposit


def test_find_divergence(short_chain):
    a0, a1 = short_chain.bundles[1].euro.proofs
    other = short_chain.bundles[0].euro.proofs[0]
    assert find_divergence([a0, a1], [a0, other]) == 1
    assert find_divergence([a1], [a0]) == 0
    # a strict prefix diverges at the shorter length
    assert find_divergence([a0], [a0, a1]) == 1
    with pytest.raises(IdenticalListsError):
        find_divergence([a0, a1], [a0, a1])


def test_verdict_strings():
    assert str(DepositVerdict(DepositStatus.ACCEPTED)) == "accepted"
    assert str(DepositVerdict(DepositStatus.DOUBLE_SPEND, identity="bob")) == "double-spend{bob}"
    rejected = DepositVerdict(DepositStatus.REJECTED, reason=RejectionReason.BAD_PROOF, index=3)
    assert str(rejected) == "rejected{bad-proof[3]}"
    assert str(DepositVerdict(DepositStatus.REJECTED)) == "rejected{anomaly}"


def test_withdrawal_transcript_is_blind(parties):
    """The bank's view of issuance does not contain the euro it signed."""
    _, bank, make_user = parties
    alice = make_user("alice")
    transcript = bank_withdraw(bank, alice)
    euro = alice.wallet[0].euro
    assert transcript.c_prime != euro.bank_sig.c
    assert transcript.sigma_prime != euro.bank_sig.sigma


def test_unregistered_user_is_refused(parties, params):
    ttp, bank, _ = parties
    stranger = params.g1 ** 77
    with pytest.raises(UnregisteredError):
        bank.begin_withdrawal(stranger)
    with pytest.raises(UnregisteredError):
        bank.open_deposit(stranger)


def test_deposit_needs_an_open_session(parties, short_chain):
    _, bank, make_user = parties
    alice = make_user("alice")
    with pytest.raises(ProtocolError):
        bank.bank_deposit(short_chain.bundles[0], alice.pk)


def test_deposit_accepted_then_duplicate_names_depositor(parties):
    _, bank, make_user = parties
    alice = make_user("alice")
    bank_withdraw(bank, alice)
    entry = alice.wallet[0]
    verdict = user_deposit(alice, bank)
    assert verdict.status is DepositStatus.ACCEPTED
    assert entry.spent
    assert bank.ledger.count() == 1

    again = user_deposit(alice, bank, entry, allow_double_spend=True)
    assert again.status is DepositStatus.DOUBLE_SPEND
    assert again.identity == "alice"
    assert again.divergence is None
    assert bank.ledger.incidents()[0]["identity"] == "alice"


def test_rejected_deposit_keeps_the_euro(parties):
    _, bank, make_user = parties
    alice = make_user("alice")
    bank_withdraw(bank, alice)
    rand = bank.open_deposit(alice.pk)
    spent, bundle = alice.user_spend_to(rand)
    sig = bundle.cur_theta_sig
    forged = replace(bundle, cur_theta_sig=Signature(sig.sigma + 1, sig.c))
    verdict = bank.bank_deposit(forged, alice.pk)
    assert verdict.status is DepositStatus.REJECTED
    assert verdict.reason is RejectionReason.BAD_THETA_SIG
    assert not spent.spent
    assert bank.ledger.count() == 0


def test_ledger_shares_database_file(params, crs, tmp_path):
    bank = BankState.create(params, crs, lambda a, b: None, seeded_rng(0, "bank"),
                            ledger_path=str(tmp_path / "bank.db"))
    assert bank.users.conn is bank.ledger.conn
    bank.ledger.close()


@pytest.mark.slow
def test_forked_euro_names_the_double_spender(parties):
    """alice pays bob and carol the same euro; both deposit."""
    _, bank, make_user = parties
    alice, bob, carol = (make_user(n) for n in ("alice", "bob", "carol"))
    bank_withdraw(bank, alice)
    entry = alice.wallet[0]
    pay(alice, bob, entry)
    pay(alice, carol, entry, allow_double_spend=True)

    assert user_deposit(bob, bank).status is DepositStatus.ACCEPTED
    verdict = user_deposit(carol, bank)
    assert verdict.status is DepositStatus.DOUBLE_SPEND
    assert verdict.identity == "alice"
    assert verdict.divergence == 0
