"""Command-line entry point: party servers, scripted scenarios and benchmarks.

    euro params init --params-dir params
    euro ttp serve --params-dir params
    euro bank serve
    euro user run --transfers 5
    euro scenario honest --transfers 10 --transport socket
    euro scenario double-spend --transfers 6 --fork-at 3
    euro bench growth --out results/growth.csv
    euro bench verify --repeats 10 --out results/verify.csv

Exit code 0 means every check of the run passed.
"""

import argparse
import logging
import threading
from pathlib import Path
from typing import List, Optional, Tuple

from ..core import crs as crs_module
from ..core.backends import BACKENDS
from ..core.config import Settings, load_settings
from ..core.crs import CommonReferenceString, Trapdoor
from ..core.errors import EuroError
from ..core.ledger import Registry
from ..core.pairing import GroupParams, default_rng, load_group, seeded_rng
from ..interface import session
from ..interface.bank import BankState
from ..interface.transport import SocketConnection
from ..interface.ttp import BANK_IDENTITY, TtpState
from . import bench, report, scenario
from .report import console

CRS_FILE = "crs.bin"
TRAPDOOR_FILE = "trapdoor.bin"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="euro", description="Offline transferable digital euro")
    parser.add_argument("--config", type=Path, default=None, help="Settings YAML (default config/settings.yaml)")
    parser.add_argument("--backend", choices=sorted(BACKENDS), default=None, help="Pairing backend")
    parser.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    roles = parser.add_subparsers(dest="role", required=True)

    def add_network(p: argparse.ArgumentParser) -> None:
        p.add_argument("--host", default=None, help="Server host (default from settings)")
        p.add_argument("--port", type=int, default=None, help="Listen port (default from settings)")
        p.add_argument("--ttp-port", type=int, default=None, help="TTP port to dial")
        p.add_argument("--bank-port", type=int, default=None, help="Bank port to dial")

    def add_run(p: argparse.ArgumentParser) -> None:
        p.add_argument("--transfers", type=int, default=None, help="Number of transfers (default from settings)")
        p.add_argument("--repeats", type=int, default=None, help="Timing repeats per chain length")
        p.add_argument("--seed", type=int, default=0, help="Seed for every party's random stream")
        p.add_argument("--transport", choices=scenario.TRANSPORTS, default="inproc")
        p.add_argument("--out", default=None, help="CSV output path")

    params = roles.add_parser("params", help="Public parameters").add_subparsers(dest="action", required=True)
    init = params.add_parser("init", help="Generate a CRS and its trapdoor")
    init.add_argument("--params-dir", type=Path, default=Path("params"))
    init.add_argument("--seed", type=int, default=None, help="Deterministic parameters (tests only)")

    ttp = roles.add_parser("ttp", help="Trusted third party").add_subparsers(dest="action", required=True)
    ttp_serve = ttp.add_parser("serve", help="Serve registration and revocation")
    ttp_serve.add_argument("--params-dir", type=Path, default=None, help="Load the CRS from params init")
    add_network(ttp_serve)

    bank = roles.add_parser("bank", help="Bank").add_subparsers(dest="action", required=True)
    add_network(bank.add_parser("serve", help="Serve withdrawals and deposits"))

    user = roles.add_parser("user", help="Users").add_subparsers(dest="action", required=True)
    user_run = user.add_parser("run", help="Withdraw, transfer among local users, deposit")
    user_run.add_argument("--name", default="user", help="Identity prefix for the local users")
    add_network(user_run)
    add_run(user_run)

    scen = roles.add_parser("scenario", help="Scripted runs").add_subparsers(dest="action", required=True)
    add_run(scen.add_parser("honest", help="Withdraw, n transfers, deposit"))
    double = scen.add_parser("double-spend", help="Fork the chain and deposit both branches")
    add_run(double)
    double.add_argument("--fork-at", type=int, default=None, help="Holder index that double-spends")
    double.add_argument("--duplicate-deposit", action="store_true", help="Deposit the same euro twice")

    benches = roles.add_parser("bench", help="Benchmarks").add_subparsers(dest="action", required=True)
    add_run(benches.add_parser("growth", help="Serialized size per transfer"))
    add_run(benches.add_parser("verify", help="Verification time per chain length"))
    return parser


def _config(args: argparse.Namespace, settings: Settings) -> scenario.ScenarioConfig:
    return scenario.ScenarioConfig(
        transfers=settings.bench.transfers if args.transfers is None else args.transfers,
        repeats=settings.bench.repeats if args.repeats is None else args.repeats,
        seed=args.seed,
        transport=args.transport,
        fork_at=getattr(args, "fork_at", None),
        out=args.out,
        backend=settings.pairing.backend,
        duplicate_deposit=getattr(args, "duplicate_deposit", False),
        timeout_s=settings.network.timeout_s,
    )


def _endpoints(args: argparse.Namespace, settings: Settings) -> Tuple[str, int, int]:
    net = settings.network
    return args.host or net.host, args.ttp_port or net.ttp_port, args.bank_port or net.bank_port


def _load_params(params_dir: Path, params: GroupParams) -> Tuple[CommonReferenceString, Trapdoor]:
    crs = CommonReferenceString.from_bytes((params_dir / CRS_FILE).read_bytes(), params)
    trapdoor = crs_module.trapdoor_from_bytes((params_dir / TRAPDOOR_FILE).read_bytes(), params)
    return crs, trapdoor


def params_init(args: argparse.Namespace, settings: Settings) -> int:
    params = load_group(settings.pairing.backend)
    rng = seeded_rng(args.seed, "ttp") if args.seed is not None else default_rng()
    crs, trapdoor = crs_module.generate(params, rng)
    args.params_dir.mkdir(parents=True, exist_ok=True)
    (args.params_dir / CRS_FILE).write_bytes(crs.to_bytes())
    (args.params_dir / TRAPDOOR_FILE).write_bytes(crs_module.trapdoor_to_bytes(trapdoor, params))
    console.print(report.format_settings(
        {"backend": params.params_id, "crs": args.params_dir / CRS_FILE, "trapdoor": args.params_dir / TRAPDOOR_FILE},
        title="Parameters",
    ))
    return 0


def _serve_forever(server: session.PartyServer, who: str) -> int:
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logging.info(f"{who} shutting down")
    finally:
        server.server_close()
    return 0


def ttp_serve(args: argparse.Namespace, settings: Settings) -> int:
    params = load_group(settings.pairing.backend)
    if args.params_dir is not None:
        crs, trapdoor = _load_params(args.params_dir, params)
        ttp = TtpState(params, crs, trapdoor, Registry(settings.storage.registry_path))
    else:
        ttp = TtpState.setup(params, default_rng(), settings.storage.registry_path)
    lock = threading.Lock()
    host, port, _ = _endpoints(args, settings)
    server = session.party_server(
        host, args.port or port, lambda conn: session.serve_ttp(ttp, conn, lock), settings.network.timeout_s
    )
    return _serve_forever(server, "TTP")


def bank_serve(args: argparse.Namespace, settings: Settings) -> int:
    host, ttp_port, bank_port = _endpoints(args, settings)
    timeout = settings.network.timeout_s
    params = load_group(settings.pairing.backend)

    def dial_ttp() -> SocketConnection:
        return SocketConnection.connect(host, ttp_port, timeout)

    with dial_ttp() as conn:
        rep = session.fetch_params(conn, params)
        params = rep.crs.params
        bank = BankState.create(
            params,
            rep.crs,
            session.RemoteRevoker(dial_ttp, params),
            default_rng(),
            ledger_path=settings.storage.ledger_path,
        )
        session.register(conn, params, BANK_IDENTITY, bank.pk)

    lock = threading.Lock()
    server = session.party_server(
        host, args.port or bank_port, lambda conn: session.serve_bank(bank, conn, lock), timeout
    )
    return _serve_forever(server, "Bank")


def _show_scenario(result: scenario.ScenarioReport) -> int:
    console.print(report.format_steps(result.steps))
    console.print(report.format_scenario(result))
    return result.exit_code


def user_run(args: argparse.Namespace, settings: Settings) -> int:
    host, ttp_port, bank_port = _endpoints(args, settings)
    result = scenario.scenario_remote(_config(args, settings), host, ttp_port, bank_port, args.name)
    return _show_scenario(result)


def scenario_honest(args: argparse.Namespace, settings: Settings) -> int:
    return _show_scenario(scenario.scenario_honest(_config(args, settings)))


def scenario_double_spend(args: argparse.Namespace, settings: Settings) -> int:
    return _show_scenario(scenario.scenario_double_spend(_config(args, settings)))


def bench_growth(args: argparse.Namespace, settings: Settings) -> int:
    config = _config(args, settings)
    summary = bench.bench_growth(config)
    console.print(report.format_growth(summary))
    return 0 if summary.increments <= {summary.predicted_increment} else 1


def bench_verify(args: argparse.Namespace, settings: Settings) -> int:
    config = _config(args, settings)
    summary = bench.bench_verify(config)
    console.print(report.format_timing(summary))
    console.print(report.format_fit(summary, bench.host_info()))
    # absolute times are reported only; a single chain length has no slope
    return 0 if len(summary.per_index) < 2 or summary.slope_ns > 0 else 1


COMMANDS = {
    ("params", "init"): params_init,
    ("ttp", "serve"): ttp_serve,
    ("bank", "serve"): bank_serve,
    ("user", "run"): user_run,
    ("scenario", "honest"): scenario_honest,
    ("scenario", "double-spend"): scenario_double_spend,
    ("bench", "growth"): bench_growth,
    ("bench", "verify"): bench_verify,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format='%(asctime)s - %(message)s',
    )
    try:
        settings = load_settings(args.config)
        if args.backend:
            settings.pairing.backend = args.backend
        return COMMANDS[(args.role, args.action)](args, settings)
    except (EuroError, ValueError, OSError) as e:
        logging.error(f"{args.role} {args.action} failed: {str(e)}")
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
