"""Where the TTP and the bank live for a run of users.

A LocalNetwork keeps both parties in this process and serves every request
over a Binding; a RemoteNetwork dials the TTP and bank servers over TCP.
User-to-user transfers always go through the Binding.
"""

import logging
import threading
from abc import ABC, abstractmethod
from typing import Callable, Optional, TypeVar

from ..core.errors import ProtocolError
from ..core.pairing import GroupParams, seeded_rng
from . import session
from .bank import BankState
from .transport import Binding, Connection, FrameLog, RecordingConnection, SocketConnection
from .ttp import BANK_IDENTITY, TtpState

T = TypeVar("T")

TTP_LABEL = "ttp"
BANK_LABEL = "bank"


class Network(ABC):
    def __init__(self, params: GroupParams, binding: Binding):
        self.params = params
        self.binding = binding

    @abstractmethod
    def ttp_exchange(self, client: Callable[[Connection], T], label: str) -> T: ...

    @abstractmethod
    def bank_exchange(self, client: Callable[[Connection], T], label: str) -> T: ...


class LocalNetwork(Network):
    def __init__(self, params: GroupParams, binding: Binding, ttp: TtpState):
        super().__init__(params, binding)
        self.ttp = ttp
        self.ttp_lock = threading.Lock()
        self.bank_lock = threading.Lock()
        self.bank: Optional[BankState] = None

    @classmethod
    def start(cls, params: GroupParams, binding: Binding, seed: int) -> "LocalNetwork":
        """TTP setup, then the bank fetches the CRS and registers its key."""
        ttp = TtpState.setup(params, seeded_rng(seed, TTP_LABEL))
        network = cls(params, binding, ttp)
        revoker = session.BindingRevoker(binding, ttp, network.ttp_lock, BANK_LABEL)

        def bank_joins(conn: Connection) -> BankState:
            rep = session.fetch_params(conn, params)
            bank = BankState.create(params, rep.crs, revoker, seeded_rng(seed, BANK_LABEL))
            session.register(conn, params, BANK_IDENTITY, bank.pk)
            return bank

        network.bank = network.ttp_exchange(bank_joins, BANK_LABEL)
        logging.info(f"Local network up over {binding.name}")
        return network

    def ttp_exchange(self, client: Callable[[Connection], T], label: str) -> T:
        return self.binding.run_exchange(
            lambda conn: session.serve_ttp(self.ttp, conn, self.ttp_lock), client, TTP_LABEL, label
        )

    def bank_exchange(self, client: Callable[[Connection], T], label: str) -> T:
        if self.bank is None:
            raise ProtocolError("bank is not set up")
        bank = self.bank
        return self.binding.run_exchange(
            lambda conn: session.serve_bank(bank, conn, self.bank_lock), client, BANK_LABEL, label
        )


class RemoteNetwork(Network):
    def __init__(
        self,
        params: GroupParams,
        binding: Binding,
        host: str,
        ttp_port: int,
        bank_port: int,
        timeout: Optional[float] = 30.0,
        log: Optional[FrameLog] = None,
    ):
        super().__init__(params, binding)
        self.host = host
        self.ttp_port = ttp_port
        self.bank_port = bank_port
        self.timeout = timeout
        self.log = log

    def _exchange(self, port: int, peer: str, client: Callable[[Connection], T], label: str) -> T:
        conn: Connection = SocketConnection.connect(self.host, port, self.timeout)
        if self.log is not None:
            conn = RecordingConnection(conn, self.log, label, peer)
        with conn:
            return client(conn)

    def ttp_exchange(self, client: Callable[[Connection], T], label: str) -> T:
        return self._exchange(self.ttp_port, TTP_LABEL, client, label)

    def bank_exchange(self, client: Callable[[Connection], T], label: str) -> T:
        return self._exchange(self.bank_port, BANK_LABEL, client, label)

