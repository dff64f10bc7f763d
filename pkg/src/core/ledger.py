import duckdb
import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from .errors import AlreadyRegisteredError
from .pairing import GroupParams
from .token import DigitalEuro, deserialize_euro, serialize_euro


def _connect(db_path: Optional[str]) -> Any:
    if db_path:
        return duckdb.connect(db_path)
    return duckdb.connect(':memory:')


@dataclass
class Registry:
    """Public key -> legal identity map. In memory unless a db_path is given."""
    db_path: Optional[str] = None
    conn: Optional[Any] = None

    def __post_init__(self):
        if self.conn is None:
            self.conn = _connect(self.db_path)
        self.conn.execute("""
            CREATE TABLE IF NOT EXISTS registry (
                pubkey BLOB PRIMARY KEY,
                identity VARCHAR NOT NULL,
                registered_at TIMESTAMP DEFAULT current_timestamp
            )
        """)

    def close(self):
        if self.conn:
            self.conn.close()
            self.conn = None

    def register(self, identity: str, pubkey: bytes) -> None:
        if self.lookup(pubkey) is not None:
            raise AlreadyRegisteredError("public key already registered")
        try:
            self.conn.execute(
                "INSERT INTO registry (pubkey, identity) VALUES (?, ?)", [pubkey, identity]
            )
        except Exception as e:
            logging.error(f"Failed to register {identity}: {str(e)}")
            raise

    def lookup(self, pubkey: bytes) -> Optional[str]:
        row = self.conn.execute(
            "SELECT identity FROM registry WHERE pubkey = ?", [pubkey]
        ).fetchone()
        return row[0] if row else None

    def __contains__(self, pubkey: bytes) -> bool:
        return self.lookup(pubkey) is not None

    def count(self) -> int:
        return self.conn.execute("SELECT COUNT(*) FROM registry").fetchone()[0]


@dataclass
class DepositLedger:
    """Deposited euros keyed by dedup key, plus the double-spend incident log."""
    params: GroupParams
    db_path: Optional[str] = None
    conn: Optional[Any] = None

    def __post_init__(self):
        if self.conn is None:
            self.conn = _connect(self.db_path)
        self.conn.execute("""
            CREATE TABLE IF NOT EXISTS deposits (
                dedup_key BLOB PRIMARY KEY,
                euro BLOB NOT NULL,
                depositor BLOB NOT NULL,
                deposited_at TIMESTAMP DEFAULT current_timestamp
            )
        """)
        self.conn.execute("""
            CREATE TABLE IF NOT EXISTS incidents (
                dedup_key BLOB,
                verdict VARCHAR,
                identity VARCHAR,
                divergence INTEGER,
                detected_at TIMESTAMP DEFAULT current_timestamp
            )
        """)

    def close(self):
        if self.conn:
            self.conn.close()
            self.conn = None

    def get(self, dedup_key: bytes) -> Optional[Tuple[DigitalEuro, bytes]]:
        row = self.conn.execute(
            "SELECT euro, depositor FROM deposits WHERE dedup_key = ?", [dedup_key]
        ).fetchone()
        if row is None:
            return None
        return deserialize_euro(bytes(row[0]), self.params), bytes(row[1])

    def store(self, euro: DigitalEuro, depositor: bytes) -> None:
        try:
            self.conn.execute(
                "INSERT INTO deposits (dedup_key, euro, depositor) VALUES (?, ?, ?)",
                [euro.dedup_key(), serialize_euro(euro), depositor],
            )
        except Exception as e:
            logging.error(f"Failed to store deposit: {str(e)}")
            raise

    def record_incident(
        self, dedup_key: bytes, verdict: str, identity: Optional[str], divergence: Optional[int]
    ) -> None:
        self.conn.execute(
            "INSERT INTO incidents (dedup_key, verdict, identity, divergence) VALUES (?, ?, ?, ?)",
            [dedup_key, verdict, identity, divergence],
        )

    def incidents(self) -> List[Dict[str, Any]]:
        rows = self.conn.execute(
            "SELECT dedup_key, verdict, identity, divergence FROM incidents ORDER BY rowid"
        ).fetchall()
        return [{
            'dedup_key': bytes(r[0]),
            'verdict': r[1],
            'identity': r[2],
            'divergence': r[3],
        } for r in rows]

    def count(self) -> int:
        return self.conn.execute("SELECT COUNT(*) FROM deposits").fetchone()[0]
