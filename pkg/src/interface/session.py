"""Protocol sessions over a Connection: client runners and party server loops.

Servers answer any EuroError with an ERR frame and keep serving the
connection; a closed connection ends the loop. Each party's state is
touched only while holding that party's lock. The bank does not hold its
lock while it waits on the TTP for a revocation.
"""

import logging
import socketserver
import threading
from typing import Callable, Optional, Type, TypeVar

from ..core.errors import EuroError, ProtocolError, UnknownTagError
from ..core.gsproof import TransactionProof
from ..core.pairing import G1Element, GroupParams
from ..core.token import TransferBundle, WalletEntry
from . import wire
from .bank import BankState, DepositStatus, DepositVerdict, RevocationRequest
from .transport import Binding, Connection, ConnectionClosed, SocketConnection
from .ttp import RevocationResult, TtpState
from .user import UserState

M = TypeVar("M", bound=wire.Message)


def send(conn: Connection, message: wire.Message) -> None:
    conn.send_frame(wire.encode(message))


def expect(conn: Connection, params: GroupParams, kind: Type[M]) -> M:
    """Next message, which must be `kind`; an ERR frame is raised as its exception."""
    message = wire.decode(conn.recv_frame(), params)
    if isinstance(message, wire.Err):
        raise message.to_exception()
    if message.tag is not kind.tag or not isinstance(message, kind):
        raise ProtocolError(f"expected {kind.tag.name}, got {message.tag.name}")
    return message


def _expect_ack(conn: Connection, params: GroupParams) -> None:
    expect(conn, params, wire.Ack)


# Client side


def fetch_params(conn: Connection, params: GroupParams) -> wire.ParamsRep:
    """`params` only seeds decoding; the reply carries its own parameter id."""
    send(conn, wire.ParamsReq())
    return expect(conn, params, wire.ParamsRep)


def register(conn: Connection, params: GroupParams, identity: str, pubkey: G1Element) -> None:
    send(conn, wire.Register(identity, pubkey))
    _expect_ack(conn, params)


def withdraw(conn: Connection, user: UserState) -> WalletEntry:
    params = user.params
    send(conn, wire.WithdrawInit(user.pk))
    nonce = expect(conn, params, wire.WithdrawNonce)
    c_prime = user.start_withdrawal(nonce.r)
    try:
        send(conn, wire.WithdrawChallenge(c_prime, params))
        resp = expect(conn, params, wire.WithdrawResp)
    except EuroError:
        user.withdrawal = None
        raise
    return user.finish_withdrawal(resp.sigma_prime)


def pay(
    conn: Connection,
    spender: UserState,
    entry: Optional[WalletEntry] = None,
    allow_double_spend: bool = False,
) -> TransferBundle:
    """Spender side: wait for the receiver's randomization, send the bundle, commit on ACK."""
    params = spender.params
    init = expect(conn, params, wire.TransferInit)
    spent, bundle = spender.user_spend_to(init.rand, entry, allow_double_spend)
    send(conn, wire.TransferPayload(bundle))
    _expect_ack(conn, params)
    spender.mark_spent(spent)
    return bundle


def receive(conn: Connection, receiver: UserState) -> WalletEntry:
    """Receiver side: offer randomization first, verify the bundle, ACK or ERR."""
    params = receiver.params
    send(conn, wire.TransferInit(receiver.offer_randomization()))
    try:
        payload = expect(conn, params, wire.TransferPayload)
    except EuroError:
        receiver.pending_receive = None
        raise
    try:
        entry = receiver.user_receive(payload.bundle)
    except EuroError as e:
        send(conn, wire.error_for(e))
        raise
    send(conn, wire.Ack())
    return entry


def deposit(
    conn: Connection,
    user: UserState,
    entry: Optional[WalletEntry] = None,
    allow_double_spend: bool = False,
) -> DepositVerdict:
    params = user.params
    send(conn, wire.DepositReq(user.pk))
    init = expect(conn, params, wire.DepositInit)
    spent, bundle = user.user_spend_to(init.rand, entry, allow_double_spend)
    send(conn, wire.DepositPayload(bundle))
    verdict = expect(conn, params, wire.DepositRep).verdict
    if verdict.status is not DepositStatus.REJECTED:
        user.mark_spent(spent)
    return verdict


def request_revocation(
    conn: Connection, params: GroupParams, proof_a: TransactionProof, proof_b: TransactionProof
) -> RevocationResult:
    send(conn, wire.RevokeReq(proof_a, proof_b))
    return expect(conn, params, wire.RevokeRep).result


class RemoteRevoker:
    """Bank-side revoker that asks a TTP over a fresh connection per request."""

    def __init__(self, connect: Callable[[], Connection], params: GroupParams):
        self.connect = connect
        self.params = params

    def __call__(self, proof_a: TransactionProof, proof_b: TransactionProof) -> RevocationResult:
        with self.connect() as conn:
            return request_revocation(conn, self.params, proof_a, proof_b)


class BindingRevoker:
    """Revoker that runs each request as a TTP exchange over a Binding."""

    def __init__(self, binding: Binding, ttp: TtpState, lock: Optional[threading.Lock] = None,
                 bank_label: str = "bank"):
        self.binding = binding
        self.ttp = ttp
        self.lock = lock or threading.Lock()
        self.bank_label = bank_label

    def __call__(self, proof_a: TransactionProof, proof_b: TransactionProof) -> RevocationResult:
        return self.binding.run_exchange(
            lambda conn: serve_ttp(self.ttp, conn, self.lock),
            lambda conn: request_revocation(conn, self.ttp.params, proof_a, proof_b),
            "ttp",
            self.bank_label,
        )


# Server side


def _serve(conn: Connection, params: GroupParams, handle: Callable[[wire.Message], None], who: str) -> None:
    while True:
        try:
            frame = conn.recv_frame()
        except ConnectionClosed:
            return
        try:
            handle(wire.decode(frame, params))
        except ConnectionClosed:
            return
        except EuroError as e:
            if isinstance(e, UnknownTagError):
                logging.warning(f"{who}: {e}")
            else:
                logging.info(f"{who}: answering error {e}")
            try:
                send(conn, wire.error_for(e))
            except ConnectionClosed:
                return


def serve_ttp(ttp: TtpState, conn: Connection, lock: Optional[threading.Lock] = None) -> None:
    lock = lock or threading.Lock()

    def handle(message: wire.Message) -> None:
        if isinstance(message, wire.ParamsReq):
            with lock:
                reply = wire.ParamsRep(ttp.crs, ttp.bank_pk)
            send(conn, reply)
        elif isinstance(message, wire.Register):
            with lock:
                ttp.register(message.identity, message.pubkey)
            send(conn, wire.Ack())
        elif isinstance(message, wire.RevokeReq):
            with lock:
                result = ttp.revoke(message.proof_a, message.proof_b)
            send(conn, wire.RevokeRep(result))
        else:
            raise ProtocolError(f"TTP does not handle {message.tag.name}")

    _serve(conn, ttp.params, handle, "ttp")


def serve_bank(bank: BankState, conn: Connection, lock: Optional[threading.Lock] = None) -> None:
    lock = lock or threading.Lock()
    params = bank.params

    def handle(message: wire.Message) -> None:
        if isinstance(message, wire.Register):
            with lock:
                bank.register_user(message.identity, message.pubkey)
            send(conn, wire.Ack())
        elif isinstance(message, wire.WithdrawInit):
            with lock:
                nonce = bank.begin_withdrawal(message.pubkey)
            send(conn, wire.WithdrawNonce(nonce.r))
            challenge = expect(conn, params, wire.WithdrawChallenge)
            with lock:
                sigma_prime = bank.complete_withdrawal(nonce, challenge.c_prime)
            send(conn, wire.WithdrawResp(sigma_prime, params))
        elif isinstance(message, wire.DepositReq):
            with lock:
                rand = bank.open_deposit(message.pubkey)
            send(conn, wire.DepositInit(rand))
            try:
                payload = expect(conn, params, wire.DepositPayload)
            except EuroError:
                with lock:
                    bank.pending.pop(message.pubkey.to_bytes(), None)
                raise
            with lock:
                outcome = bank.check_deposit(payload.bundle, message.pubkey)
            if isinstance(outcome, RevocationRequest):
                # the TTP round trip runs without the bank lock
                result = bank.ask_revoker(outcome)
                with lock:
                    outcome = bank.settle_revocation(outcome, result)
            send(conn, wire.DepositRep(outcome))
        else:
            raise ProtocolError(f"bank does not handle {message.tag.name}")

    _serve(conn, params, handle, "bank")


class _PartyHandler(socketserver.BaseRequestHandler):
    server: "PartyServer"

    def handle(self) -> None:
        conn = SocketConnection(self.request, self.server.conn_timeout)
        logging.info(f"Connection from {self.client_address}")
        try:
            self.server.serve(conn)
        except Exception as e:
            logging.error(f"Session with {self.client_address} failed: {str(e)}")


class PartyServer(socketserver.ThreadingTCPServer):
    """TCP server running one `serve` loop per accepted connection."""

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address: tuple, serve: Callable[[Connection], None], timeout: Optional[float] = None):
        self.serve = serve
        self.conn_timeout = timeout
        super().__init__(address, _PartyHandler)


def party_server(
    host: str, port: int, serve: Callable[[Connection], None], timeout: Optional[float] = None
) -> PartyServer:
    server = PartyServer((host, port), serve, timeout)
    logging.info(f"Listening on {host}:{server.server_address[1]}")
    return server
