"""Scripted end-to-end runs: honest chains and double-spend forks.

Every party draws from its own seeded stream, so a run is reproducible from
(seed, transport, transfers, fork index) down to the transcript bytes.
"""

import csv
import hashlib
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, TypeVar

from ..core.backends import BACKENDS
from ..core.errors import EuroError, ProtocolError
from ..core.pairing import GroupParams, load_group, seeded_rng
from ..core.token import WalletEntry
from ..interface import session
from ..interface.bank import DepositStatus, DepositVerdict
from ..interface.network import BANK_LABEL, TTP_LABEL, LocalNetwork, Network, RemoteNetwork
from ..interface.transport import Binding, Connection, FrameLog, make_binding
from ..interface.user import UserState
from ..interface.wire import Tag

T = TypeVar("T")

TRANSPORTS = ("inproc", "socket")


@dataclass
class ScenarioConfig:
    transfers: int = 50
    repeats: int = 10
    seed: int = 0
    transport: str = "inproc"
    fork_at: Optional[int] = None
    out: Optional[str] = None
    backend: str = "bn254"
    duplicate_deposit: bool = False
    timeout_s: float = 30.0

    def __post_init__(self):
        if self.transfers < 1:
            raise ValueError("transfers must be at least 1")
        if self.repeats < 1:
            raise ValueError("repeats must be at least 1")
        if self.backend not in BACKENDS:
            raise ValueError(f"Unknown pairing backend {self.backend!r}; expected one of {sorted(BACKENDS)}")
        if self.transport not in TRANSPORTS:
            raise ValueError(f"Unknown transport {self.transport!r}; expected one of {TRANSPORTS}")
        if self.fork_at is not None and not 0 <= self.fork_at < self.transfers:
            raise ValueError(f"fork_at must be in [0, {self.transfers}), got {self.fork_at}")


@dataclass
class ScenarioStep:
    label: str
    outcome: str
    ok: bool = True


@dataclass
class ScenarioReport:
    name: str
    passed: bool = False
    steps: List[ScenarioStep] = field(default_factory=list)
    frame_count: int = 0
    transcript_digest: str = ""
    failure: Optional[str] = None
    verdicts: List[DepositVerdict] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def transcript_digest(log: FrameLog) -> str:
    digest = hashlib.sha256()
    for record in log.records:
        digest.update(f"{record.sender}>{record.receiver}:".encode())
        digest.update(record.frame)
    return digest.hexdigest()


def _tag_name(tag: int) -> str:
    try:
        return Tag(tag).name
    except ValueError:
        return f"0x{tag:02x}"


def write_transcript(log: FrameLog, path: str) -> None:
    """One CSV row per frame: index, sender, receiver, tag, hex bytes."""
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["index", "sender", "receiver", "tag", "frame"])
        writer.writeheader()
        for i, record in enumerate(log.records):
            writer.writerow({
                "index": i,
                "sender": record.sender,
                "receiver": record.receiver,
                "tag": _tag_name(record.tag),
                "frame": record.frame.hex(),
            })
    logging.info(f"Wrote {len(log.records)} frames to {out}")


class Simulation:
    """Users on one network; every step goes through the wire protocol."""

    def __init__(self, network: Network, seed: int, report: ScenarioReport):
        self.network = network
        self.params: GroupParams = network.params
        self.seed = seed
        self.report = report
        self.users: Dict[str, UserState] = {}

    def step(self, label: str, action: Callable[[], T], describe: Callable[[T], str] = lambda _: "ok") -> T:
        try:
            result = action()
        except EuroError as e:
            self.report.steps.append(ScenarioStep(label, str(e), ok=False))
            raise
        self.report.steps.append(ScenarioStep(label, describe(result)))
        return result

    def join(self, identity: str) -> UserState:
        """Fetch parameters from the TTP, register there, then at the bank."""
        params = self.params
        seed = self.seed

        def with_ttp(conn: Connection) -> UserState:
            rep = session.fetch_params(conn, params)
            if rep.bank_pk is None:
                raise ProtocolError("TTP has no bank key yet")
            user = UserState.create(identity, rep.crs.params, rep.crs, rep.bank_pk, seeded_rng(seed, identity))
            session.register(conn, params, identity, user.pk)
            return user

        user = self.network.ttp_exchange(with_ttp, identity)
        self.network.bank_exchange(lambda conn: session.register(conn, params, identity, user.pk), identity)
        self.users[identity] = user
        return user

    def withdraw(self, user: UserState) -> WalletEntry:
        return self.step(
            f"withdraw {user.identity}",
            lambda: self.network.bank_exchange(lambda conn: session.withdraw(conn, user), user.identity),
        )

    def transfer(
        self,
        spender: UserState,
        receiver: UserState,
        entry: Optional[WalletEntry] = None,
        allow_double_spend: bool = False,
    ) -> WalletEntry:
        """The receiver serves: it offers randomization and verifies the bundle."""

        def run() -> WalletEntry:
            self.network.binding.run_exchange(
                lambda conn: session.receive(conn, receiver),
                lambda conn: session.pay(conn, spender, entry, allow_double_spend),
                receiver.identity,
                spender.identity,
            )
            return receiver.wallet[-1]

        return self.step(
            f"{spender.identity} -> {receiver.identity}",
            run,
            lambda received: f"accepted ({len(received.euro.proofs)} proofs)",
        )

    def deposit(
        self, user: UserState, entry: Optional[WalletEntry] = None, allow_double_spend: bool = False
    ) -> DepositVerdict:
        verdict = self.step(
            f"deposit {user.identity}",
            lambda: self.network.bank_exchange(
                lambda conn: session.deposit(conn, user, entry, allow_double_spend), user.identity
            ),
            str,
        )
        self.report.verdicts.append(verdict)
        logging.info(f"Deposit by {user.identity}: {verdict}")
        return verdict


def _user_name(i: int, prefix: str = "user") -> str:
    return f"{prefix}-{i}"


def _run(
    config: ScenarioConfig,
    name: str,
    body: Callable[[Simulation], Optional[str]],
    connect: Optional[Callable[[GroupParams, Binding, FrameLog], Network]] = None,
) -> ScenarioReport:
    """Set up a network (local unless `connect` is given) and run `body`.

    A string returned by `body` is the failure message.
    """
    report = ScenarioReport(name)
    log = FrameLog()
    binding = make_binding(config.transport, log, config.timeout_s)
    params = load_group(config.backend)
    try:
        if connect is None:
            network: Network = LocalNetwork.start(params, binding, config.seed)
        else:
            network = connect(params, binding, log)
        failure = body(Simulation(network, config.seed, report))
    except EuroError as e:
        failure = f"{type(e).__name__}: {e}"
    report.failure = failure
    report.passed = failure is None
    report.frame_count = len(log.records)
    report.transcript_digest = transcript_digest(log)
    if config.out:
        write_transcript(log, config.out)
    if failure:
        logging.error(f"Scenario {name} failed: {failure}")
    else:
        logging.info(f"Scenario {name} passed")
    return report


def _chain(sim: Simulation, transfers: int, prefix: str = "user") -> List[UserState]:
    users = [sim.join(_user_name(i, prefix)) for i in range(transfers + 1)]
    sim.withdraw(users[0])
    for i in range(transfers):
        sim.transfer(users[i], users[i + 1])
    return users


def _honest(transfers: int, prefix: str = "user") -> Callable[[Simulation], Optional[str]]:
    def body(sim: Simulation) -> Optional[str]:
        users = _chain(sim, transfers, prefix)
        verdict = sim.deposit(users[-1])
        if verdict.status is not DepositStatus.ACCEPTED:
            return f"deposit not accepted: {verdict}"
        return None

    return body


def scenario_honest(config: ScenarioConfig) -> ScenarioReport:
    """Withdraw, pass the euro along `transfers` distinct users, deposit."""
    return _run(config, "honest", _honest(config.transfers))


def scenario_remote(
    config: ScenarioConfig, host: str, ttp_port: int, bank_port: int, prefix: str = "user"
) -> ScenarioReport:
    """The honest run against TTP and bank servers in other processes."""

    def connect(params: GroupParams, binding: Binding, log: FrameLog) -> Network:
        return RemoteNetwork(params, binding, host, ttp_port, bank_port, config.timeout_s, log)

    return _run(config, f"remote ({host})", _honest(config.transfers, prefix), connect)


def _revocation_requests(sim: Simulation) -> int:
    network = sim.network
    assert isinstance(network, LocalNetwork)
    log = network.binding.log
    assert log is not None
    return sum(1 for r in log.between(BANK_LABEL, TTP_LABEL) if r.tag == Tag.REVOKE_REQ)


def scenario_double_spend(config: ScenarioConfig) -> ScenarioReport:
    """Fork the chain at `fork_at` (or deposit twice) and check who gets named."""
    if config.fork_at is None and not config.duplicate_deposit:
        raise ValueError("double-spend scenario needs fork_at or duplicate_deposit")

    def duplicate(sim: Simulation) -> Optional[str]:
        users = _chain(sim, config.transfers)
        holder = users[-1]
        entry = holder.wallet[-1]
        first = sim.deposit(holder, entry)
        if first.status is not DepositStatus.ACCEPTED:
            return f"first deposit not accepted: {first}"
        second = sim.deposit(holder, entry, allow_double_spend=True)
        if second.status is not DepositStatus.DOUBLE_SPEND or second.identity != holder.identity:
            return f"expected double-spend{{{holder.identity}}}, got {second}"
        if _revocation_requests(sim):
            return "duplicate deposit reached the TTP"
        return None

    def fork(sim: Simulation) -> Optional[str]:
        assert config.fork_at is not None
        n = config.transfers
        users = [sim.join(_user_name(i)) for i in range(n + 1)]
        branch = sim.join("branch")
        sim.withdraw(users[0])
        for i in range(n):
            spender = users[i]
            if i == config.fork_at:
                held = spender.unspent()[0]
                sim.transfer(spender, users[i + 1], held)
                sim.transfer(spender, branch, held, allow_double_spend=True)
            else:
                sim.transfer(spender, users[i + 1])

        first = sim.deposit(users[-1])
        if first.status is not DepositStatus.ACCEPTED:
            return f"first deposit not accepted: {first}"
        second = sim.deposit(branch)
        cheater = users[config.fork_at].identity
        if second.status is not DepositStatus.DOUBLE_SPEND or second.identity != cheater:
            return f"expected double-spend{{{cheater}}}, got {second}"
        if second.divergence != config.fork_at:
            return f"expected divergence at {config.fork_at}, got {second.divergence}"
        if _revocation_requests(sim) != 1:
            return "expected exactly one revocation request"
        return None

    if config.duplicate_deposit:
        return _run(config, "double-spend (duplicate deposit)", duplicate)
    return _run(config, f"double-spend (fork at {config.fork_at})", fork)
