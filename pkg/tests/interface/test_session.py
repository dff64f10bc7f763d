import threading
from dataclasses import replace

import pytest

from src.core.errors import ProtocolError, RejectionReason, TransferRejected
from src.core.gsproof import derive_randomization
from src.core.pairing import seeded_rng
from src.interface import session, wire
from src.interface.bank import DepositStatus
from src.interface.transport import ConnectionClosed, FrameLog, InProcessBinding, make_binding
from src.interface.ttp import RevocationResult, RevocationVerdict
from src.interface.user import UserState
from src.interface.wire import ErrorCode, Tag


@pytest.fixture
def binding():
    return InProcessBinding(FrameLog(), timeout=30.0)


def _with_ttp(binding, ttp, client, label="client"):
    return binding.run_exchange(lambda conn: session.serve_ttp(ttp, conn), client, "ttp", label)


def _with_bank(binding, bank, client, label="client"):
    return binding.run_exchange(lambda conn: session.serve_bank(bank, conn), client, "bank", label)


def test_fetch_params(binding, parties, params):
    ttp, bank, _ = parties
    rep = _with_ttp(binding, ttp, lambda conn: session.fetch_params(conn, params))
    assert rep.crs == ttp.crs
    assert rep.bank_pk == bank.pk


def test_server_answers_errors_and_keeps_serving(binding, parties, params):
    ttp, _, make_user = parties
    alice = make_user("alice")

    def client(conn):
        with pytest.raises(wire.RemoteError) as info:
            session.register(conn, params, "mallory", alice.pk)
        assert info.value.code == ErrorCode.ALREADY_REGISTERED
        # the same connection still works
        return session.fetch_params(conn, params)

    assert _with_ttp(binding, ttp, client).crs == ttp.crs


def test_unexpected_message_is_a_protocol_error(binding, parties, params):
    _, bank, _ = parties

    def client(conn):
        session.send(conn, wire.Ack())
        return wire.decode(conn.recv_frame(), params)

    reply = _with_bank(binding, bank, client)
    assert reply == wire.Err(ErrorCode.PROTOCOL)


def test_withdraw_and_deposit_over_frames(binding, parties):
    _, bank, make_user = parties
    alice = make_user("alice")
    entry = _with_bank(binding, bank, lambda conn: session.withdraw(conn, alice), "alice")
    assert alice.wallet == [entry]

    verdict = _with_bank(binding, bank, lambda conn: session.deposit(conn, alice), "alice")
    assert verdict.status is DepositStatus.ACCEPTED
    assert entry.spent
    tags = [r.tag for r in binding.log.records]
    assert tags == [
        Tag.WITHDRAW_INIT, Tag.WITHDRAW_NONCE, Tag.WITHDRAW_CHALLENGE, Tag.WITHDRAW_RESP,
        Tag.DEPOSIT_REQ, Tag.DEPOSIT_INIT, Tag.DEPOSIT_PAYLOAD, Tag.DEPOSIT_REP,
    ]


def test_rejected_transfer_leaves_spender_entry(binding, parties, params):
    """A receiver trusting the wrong bank key refuses; the spender keeps the euro."""
    ttp, bank, make_user = parties
    alice = make_user("alice")
    _with_bank(binding, bank, lambda conn: session.withdraw(conn, alice), "alice")
    wrong_bank = params.g1 ** 99
    bob = UserState.create("bob", params, ttp.crs, wrong_bank, seeded_rng(11, "bob"))

    with pytest.raises(TransferRejected) as info:
        binding.run_exchange(
            lambda conn: session.receive(conn, bob),
            lambda conn: session.pay(conn, alice),
            "bob",
            "alice",
        )
    assert info.value.reason is RejectionReason.BAD_BANK_SIG
    assert not alice.wallet[0].spent
    assert bob.wallet == []
    assert binding.log.records[-1].tag == Tag.ERR


def test_transfer_touches_only_the_two_users(binding, parties):
    _, bank, make_user = parties
    alice, bob = make_user("alice"), make_user("bob")
    _with_bank(binding, bank, lambda conn: session.withdraw(conn, alice), "alice")
    before = len(binding.log.records)
    bundle = binding.run_exchange(
        lambda conn: session.receive(conn, bob),
        lambda conn: session.pay(conn, alice),
        "bob",
        "alice",
    )
    transfer = binding.log.records[before:]
    assert [r.tag for r in transfer] == [Tag.TRANSFER_INIT, Tag.TRANSFER_PAYLOAD, Tag.ACK]
    assert all({r.sender, r.receiver} == {"alice", "bob"} for r in transfer)
    assert alice.wallet[0].spent
    assert bob.wallet[0].euro == bundle.euro


def test_binding_revoker_asks_over_frames(parties, short_chain):
    ttp, *_ = parties
    log = FrameLog()
    revoker = session.BindingRevoker(InProcessBinding(log, timeout=30.0), ttp)
    first, second = short_chain.bundles[1].euro.proofs
    # proofs under another CRS open to unrelated points, so no double spend
    result = revoker(first, second)
    assert not result.identified
    assert [(r.sender, r.tag) for r in log.records] == [("bank", Tag.REVOKE_REQ), ("ttp", Tag.REVOKE_REP)]


@pytest.mark.parametrize("transport", ["inproc", "socket"])
def test_dropped_transfer_leaves_spender_wallet(parties, transport):
    """The receiver hangs up after TRANSFER_INIT; alice never sees an ACK."""
    _, bank, make_user = parties
    alice, bob = make_user("alice"), make_user("bob")
    _with_bank(InProcessBinding(FrameLog(), timeout=30.0), bank, lambda conn: session.withdraw(conn, alice), "alice")

    def hang_up(conn):
        session.send(conn, wire.TransferInit(bob.offer_randomization()))

    with pytest.raises(ConnectionClosed):
        make_binding(transport, FrameLog(), timeout=10.0).run_exchange(
            hang_up, lambda conn: session.pay(conn, alice), "bob", "alice"
        )
    assert not alice.wallet[0].spent
    assert bob.wallet == []


def test_pay_refuses_a_deposit_init(binding, parties, crs, rng):
    """DEPOSIT_INIT carries the same fields as TRANSFER_INIT but is a different message."""
    _, _, make_user = parties
    alice = make_user("alice")
    rand = derive_randomization(crs, rng).elements

    with pytest.raises(ProtocolError, match="expected TRANSFER_INIT"):
        binding.run_exchange(
            lambda conn: session.send(conn, wire.DepositInit(rand)),
            lambda conn: session.pay(conn, alice),
            "bank",
            "alice",
        )


def test_receive_clears_offer_when_payload_is_missing(binding, parties, params):
    _, _, make_user = parties
    alice, bob = make_user("alice"), make_user("bob")

    def wrong_reply(conn):
        session.expect(conn, params, wire.TransferInit)
        session.send(conn, wire.Ack())

    with pytest.raises(ProtocolError, match="expected TRANSFER_PAYLOAD"):
        binding.run_exchange(lambda conn: session.receive(conn, bob), wrong_reply, "bob", "alice")
    assert bob.pending_receive is None
    assert bob.wallet == []


def test_bank_lock_is_free_while_the_ttp_is_asked(binding, parties, params, short_chain, monkeypatch):
    """A forked deposit reaches the revoker with the bank lock released."""
    _, bank, make_user = parties
    alice = make_user("alice")
    monkeypatch.setattr("src.interface.bank.receive_verify", lambda *args: None)
    lock = threading.Lock()
    held_during_revocation = []

    def revoker(proof_a, proof_b):
        held_during_revocation.append(lock.locked())
        return RevocationResult(RevocationVerdict.IDENTIFIED, "carol")

    bank.revoker = revoker
    honest = short_chain.bundles[1]
    p0, p1 = honest.euro.proofs
    forked = replace(honest, euro=replace(honest.euro, proofs=(p0.with_target(p0.target * params.gt), p1)))

    def deposit_bundle(bundle):
        def client(conn):
            session.send(conn, wire.DepositReq(alice.pk))
            session.expect(conn, params, wire.DepositInit)
            session.send(conn, wire.DepositPayload(bundle))
            return session.expect(conn, params, wire.DepositRep).verdict
        return binding.run_exchange(lambda conn: session.serve_bank(bank, conn, lock), client, "bank", "alice")

    assert deposit_bundle(honest).status is DepositStatus.ACCEPTED
    verdict = deposit_bundle(forked)
    assert verdict.status is DepositStatus.DOUBLE_SPEND
    assert verdict.identity == "carol"
    assert verdict.divergence == 0
    assert held_during_revocation == [False]
    assert bank.ledger.incidents()[0]["identity"] == "carol"
