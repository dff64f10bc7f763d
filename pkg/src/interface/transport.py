"""Point-to-point frame transports.

Both bindings carry whole frames (header included) between exactly two
endpoints: an in-process queue pair for tests and simulation, and a TCP
stream for multi-process runs. A RecordingConnection wrapper logs every
frame it sends so tests can inspect who talked to whom.
"""

import logging
import queue
import socket
import threading
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, TypeVar

from ..core.errors import ProtocolError
from .wire import FRAME_HEADER

T = TypeVar("T")

_CLOSED = object()


class ConnectionClosed(ProtocolError):
    """The peer went away (or timed out) mid-session."""


class Connection(ABC):
    @abstractmethod
    def send_frame(self, frame: bytes) -> None: ...

    @abstractmethod
    def recv_frame(self) -> bytes: ...

    @abstractmethod
    def close(self) -> None: ...

    def __enter__(self) -> "Connection":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()


class QueueConnection(Connection):
    def __init__(self, inbox: "queue.Queue[object]", outbox: "queue.Queue[object]", timeout: Optional[float] = None):
        self.inbox = inbox
        self.outbox = outbox
        self.timeout = timeout
        self.closed = False

    @classmethod
    def pair(cls, timeout: Optional[float] = None) -> Tuple["QueueConnection", "QueueConnection"]:
        a_to_b: "queue.Queue[object]" = queue.Queue()
        b_to_a: "queue.Queue[object]" = queue.Queue()
        return cls(b_to_a, a_to_b, timeout), cls(a_to_b, b_to_a, timeout)

    def send_frame(self, frame: bytes) -> None:
        if self.closed:
            raise ConnectionClosed("connection closed")
        self.outbox.put(bytes(frame))

    def recv_frame(self) -> bytes:
        if self.closed:
            raise ConnectionClosed("connection closed")
        try:
            item = self.inbox.get(timeout=self.timeout)
        except queue.Empty as e:
            raise ConnectionClosed("timed out waiting for a frame") from e
        if item is _CLOSED:
            self.closed = True
            raise ConnectionClosed("peer closed the connection")
        assert isinstance(item, bytes)
        return item

    def close(self) -> None:
        if not self.closed:
            self.closed = True
            self.outbox.put(_CLOSED)


class SocketConnection(Connection):
    def __init__(self, sock: socket.socket, timeout: Optional[float] = None):
        self.sock = sock
        if timeout is not None:
            self.sock.settimeout(timeout)

    @classmethod
    def connect(cls, host: str, port: int, timeout: Optional[float] = None) -> "SocketConnection":
        try:
            sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as e:
            raise ConnectionClosed(f"cannot connect to {host}:{port}: {e}") from e
        return cls(sock, timeout)

    def _recvall(self, n: int) -> bytes:
        buf = b""
        while len(buf) < n:
            try:
                chunk = self.sock.recv(n - len(buf))
            except OSError as e:
                raise ConnectionClosed(f"receive failed: {e}") from e
            if not chunk:
                raise ConnectionClosed("peer closed the connection")
            buf += chunk
        return buf

    def send_frame(self, frame: bytes) -> None:
        try:
            self.sock.sendall(frame)
        except OSError as e:
            raise ConnectionClosed(f"send failed: {e}") from e

    def recv_frame(self) -> bytes:
        header = self._recvall(FRAME_HEADER.size)
        _, length = FRAME_HEADER.unpack(header)
        return header + self._recvall(length)

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


def open_listener(host: str, port: int, timeout: Optional[float] = None) -> socket.socket:
    listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
    listener.bind((host, port))
    listener.listen()
    listener.settimeout(timeout)
    return listener


def accept_connection(listener: socket.socket, timeout: Optional[float] = None) -> SocketConnection:
    try:
        sock, peer = listener.accept()
    except OSError as e:
        raise ConnectionClosed(f"no peer connected: {e}") from e
    logging.debug(f"Accepted connection from {peer}")
    return SocketConnection(sock, timeout)


@dataclass
class FrameRecord:
    sender: str
    receiver: str
    frame: bytes

    @property
    def tag(self) -> int:
        return self.frame[0]


@dataclass
class FrameLog:
    records: List[FrameRecord] = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def append(self, record: FrameRecord) -> None:
        with self.lock:
            self.records.append(record)

    def between(self, a: str, b: str) -> List[FrameRecord]:
        return [r for r in self.records if {r.sender, r.receiver} == {a, b}]

    def involving(self, name: str) -> List[FrameRecord]:
        return [r for r in self.records if name in (r.sender, r.receiver)]


class RecordingConnection(Connection):
    def __init__(self, inner: Connection, log: FrameLog, local: str, peer: str):
        self.inner = inner
        self.log = log
        self.local = local
        self.peer = peer

    def send_frame(self, frame: bytes) -> None:
        self.log.append(FrameRecord(self.local, self.peer, bytes(frame)))
        self.inner.send_frame(frame)

    def recv_frame(self) -> bytes:
        return self.inner.recv_frame()

    def close(self) -> None:
        self.inner.close()


class Binding(ABC):
    """Runs one two-party exchange: `serve` on one endpoint, `client` on the other."""

    name: str

    def __init__(self, log: Optional[FrameLog] = None, timeout: Optional[float] = 30.0):
        self.log = log
        self.timeout = timeout

    def _wrap(self, conn: Connection, local: str, peer: str) -> Connection:
        if self.log is None:
            return conn
        return RecordingConnection(conn, self.log, local, peer)

    @abstractmethod
    def _endpoints(self) -> Tuple[Callable[[], Connection], Callable[[], Connection], Callable[[], None]]:
        """(server endpoint factory, client endpoint factory, cleanup)."""

    def run_exchange(
        self,
        serve: Callable[[Connection], object],
        client: Callable[[Connection], T],
        server_label: str,
        client_label: str,
    ) -> T:
        make_server, make_client, cleanup = self._endpoints()
        errors: List[BaseException] = []

        def server_side() -> None:
            try:
                with self._wrap(make_server(), server_label, client_label) as conn:
                    serve(conn)
            except BaseException as e:
                errors.append(e)

        thread = threading.Thread(target=server_side, name=f"{self.name}-{server_label}", daemon=True)
        thread.start()
        try:
            with self._wrap(make_client(), client_label, server_label) as conn:
                result = client(conn)
        finally:
            thread.join(self.timeout)
            cleanup()
        if errors and not isinstance(errors[0], ConnectionClosed):
            logging.error(f"{server_label} failed during exchange: {errors[0]!r}")
            raise errors[0]
        return result


class InProcessBinding(Binding):
    name = "inproc"

    def _endpoints(self):
        server_end, client_end = QueueConnection.pair(self.timeout)
        return (lambda: server_end), (lambda: client_end), (lambda: None)


class SocketBinding(Binding):
    name = "socket"

    def __init__(self, host: str = "127.0.0.1", log: Optional[FrameLog] = None,
                 timeout: Optional[float] = 30.0):
        super().__init__(log, timeout)
        self.host = host

    def _endpoints(self):
        listener = open_listener(self.host, 0, self.timeout)
        port = listener.getsockname()[1]
        return (
            lambda: accept_connection(listener, self.timeout),
            lambda: SocketConnection.connect(self.host, port, self.timeout),
            listener.close,
        )


def make_binding(name: str, log: Optional[FrameLog] = None, timeout: Optional[float] = 30.0) -> Binding:
    if name == "inproc":
        return InProcessBinding(log, timeout)
    if name == "socket":
        return SocketBinding(log=log, timeout=timeout)
    raise ValueError(f"unknown transport {name!r}; expected inproc or socket")
