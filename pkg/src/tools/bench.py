"""Growth-size and verification-time benchmarks.

Both benchmarks build one honest chain directly on the core API (no framing,
no receiver-side verification while building) and then measure it: the
serialized size after every transfer, and the wall time of a full
receive_verify at every chain length.
"""

import csv
import logging
import platform
import time
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np
import psutil
from tqdm import tqdm

from ..core import crs as crs_module
from ..core import schnorr, token
from ..core.crs import CommonReferenceString
from ..core.gsproof import ReceiverSecret, derive_randomization, proof_size
from ..core.pairing import G1Element, GroupKind, GroupParams, load_group, seeded_rng
from ..core.token import TransferBundle, WalletEntry
from .scenario import ScenarioConfig

GROWTH_FIELDS = ["index", "bytes"]
VERIFY_FIELDS = ["index", "repeat", "nanoseconds"]


@dataclass
class BenchRow:
    index: int
    repeat: int
    bytes: int
    nanoseconds: Optional[int] = None


@dataclass
class Chain:
    """An honest chain: bundle i moved the euro from holder i to holder i + 1."""
    params: GroupParams
    crs: CommonReferenceString
    bank_pk: G1Element
    bundles: List[TransferBundle] = field(default_factory=list)
    secrets: List[ReceiverSecret] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.bundles)


def build_chain(params: GroupParams, transfers: int, seed: int = 0, progress: bool = False) -> Chain:
    """Withdraw once and spend `transfers` times across distinct holders."""
    rng = seeded_rng(seed, "bench")
    crs, _ = crs_module.generate(params, rng)
    bank_keys = schnorr.keygen(params, rng)

    request = token.withdrawal_prepare(params, rng)
    nonce = schnorr.blind_round1_signer(params, rng)
    blind, c_prime = schnorr.blind_round2_client(nonce.r, request.message, bank_keys.pk, rng)
    bank_sig = schnorr.unblind(blind, schnorr.blind_round3_signer(nonce, c_prime, bank_keys.sk))
    entry = WalletEntry(token.DigitalEuro(request.serial_number, request.theta1_w, bank_sig), request.t0)

    chain = Chain(params, crs, bank_keys.pk)
    holder_keys = schnorr.keygen(params, rng)
    for _ in tqdm(range(transfers), desc="Building chain", disable=not progress):
        secret = derive_randomization(crs, rng)
        bundle = token.spend(entry, holder_keys, secret.elements, crs, rng)
        entry.mark_spent()
        chain.bundles.append(bundle)
        chain.secrets.append(secret)
        entry = WalletEntry.from_bundle(bundle, secret)
        holder_keys = schnorr.keygen(params, rng)
    logging.info(f"Built a {transfers}-transfer chain over {params.params_id}")
    return chain


def host_info() -> Dict[str, Any]:
    memory = psutil.virtual_memory()
    return {
        "python": platform.python_version(),
        "machine": platform.machine(),
        "cpus": psutil.cpu_count(logical=True),
        "memory": f"{memory.total / (1024 ** 3):.1f} GB",
    }


def write_rows(rows: Sequence[BenchRow], fields: List[str], path: str) -> None:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow(asdict(row))
    logging.info(f"Wrote {len(rows)} rows to {out}")


# Growth


@dataclass
class GrowthSummary:
    backend: str
    sizes: List[int]
    predicted_increment: int
    overhead: int

    @property
    def increments(self) -> Set[int]:
        """Distinct size steps from index 2 on."""
        return {b - a for a, b in zip(self.sizes[1:], self.sizes[2:])}

    @property
    def first_size(self) -> int:
        return self.sizes[1]

    @property
    def last_size(self) -> int:
        return self.sizes[-1]


def bench_growth(config: ScenarioConfig, progress: bool = True) -> GrowthSummary:
    """Serialized euro size after each of `config.transfers` transfers."""
    params = load_group(config.backend)
    chain = build_chain(params, config.transfers, config.seed, progress)

    # sizes[0] is the freshly withdrawn euro
    first = chain.bundles[0].euro
    sizes = [len(token.serialize_euro(replace(first, proofs=())))]
    rows = []
    for i, bundle in enumerate(chain.bundles, start=1):
        size = len(token.serialize_euro(bundle.euro))
        sizes.append(size)
        rows.append(BenchRow(index=i, repeat=0, bytes=size))

    if config.out:
        write_rows(rows, GROWTH_FIELDS, config.out)

    per_entry = proof_size(
        params.element_size(GroupKind.G1), params.element_size(GroupKind.G2), params.element_size(GroupKind.GT)
    )
    summary = GrowthSummary(
        backend=params.params_id,
        sizes=sizes,
        predicted_increment=per_entry,
        overhead=sizes[1] - token.predicted_size(1, params),
    )
    logging.info(f"Growth: {summary.predicted_increment} B predicted per transfer, "
                 f"measured {sorted(summary.increments)}")
    return summary


# Verification time


@dataclass
class IndexTiming:
    index: int
    min_ns: int
    max_ns: int
    mean_ns: float


@dataclass
class TimingSummary:
    backend: str
    per_index: List[IndexTiming]
    slope_ns: float
    intercept_ns: float
    r_squared: float
    rows: List[BenchRow] = field(default_factory=list, repr=False)


def least_squares(xs: Sequence[float], ys: Sequence[float]) -> Tuple[float, float, float]:
    """(slope, intercept, r squared) of a degree-one fit."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if len(x) < 2:
        return 0.0, float(y.mean()) if len(y) else 0.0, 1.0
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return float(slope), float(intercept), r_squared


def time_verify(chain: Chain, index: int) -> int:
    """Nanoseconds for one full receive_verify of the euro after `index` transfers."""
    bundle = chain.bundles[index - 1]
    secret = chain.secrets[index - 1]
    start = time.perf_counter_ns()
    token.receive_verify(bundle, secret, chain.crs, chain.bank_pk)
    return time.perf_counter_ns() - start


def bench_verify(config: ScenarioConfig, progress: bool = True) -> TimingSummary:
    params = load_group(config.backend)
    chain = build_chain(params, config.transfers, config.seed, progress)
    sizes = [len(token.serialize_euro(b.euro)) for b in chain.bundles]

    rows: List[BenchRow] = []
    per_index: List[IndexTiming] = []
    for index in tqdm(range(1, len(chain) + 1), desc="Verifying", disable=not progress):
        samples = []
        for repeat in range(config.repeats):
            ns = time_verify(chain, index)
            samples.append(ns)
            rows.append(BenchRow(index=index, repeat=repeat, bytes=sizes[index - 1], nanoseconds=ns))
        per_index.append(IndexTiming(index, min(samples), max(samples), float(np.mean(samples))))

    if config.out:
        write_rows(rows, VERIFY_FIELDS, config.out)

    slope, intercept, r_squared = least_squares(
        [t.index for t in per_index], [t.mean_ns for t in per_index]
    )
    logging.info(f"Verification: {slope / 1e6:.2f} ms per transfer, r squared {r_squared:.4f}")
    return TimingSummary(params.params_id, per_index, slope, intercept, r_squared, rows)
