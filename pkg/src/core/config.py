"""Settings loaded from config/settings.yaml with environment overrides.

Environment (or .env) variables win over the YAML file:
EURO_BACKEND, EURO_REGISTRY_PATH, EURO_LEDGER_PATH, EURO_HOST,
EURO_TTP_PORT, EURO_BANK_PORT, EURO_BENCH_OUTPUT.
"""

import os
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Union

import yaml
from dotenv import load_dotenv

from .backends import BACKENDS

DEFAULT_SETTINGS_PATH = Path(__file__).resolve().parents[2] / "config" / "settings.yaml"


@dataclass
class PairingSettings:
    backend: str = "bn254"

    def __post_init__(self):
        if self.backend not in BACKENDS:
            raise ValueError(f"Unknown pairing backend {self.backend!r}; expected one of {sorted(BACKENDS)}")


@dataclass
class NetworkSettings:
    host: str = "127.0.0.1"
    ttp_port: int = 7401
    bank_port: int = 7402
    timeout_s: float = 30.0

    def __post_init__(self):
        for name in ("ttp_port", "bank_port"):
            port = getattr(self, name)
            if not 0 <= port <= 65535:
                raise ValueError(f"{name} out of range: {port}")
        if self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive")


@dataclass
class StorageSettings:
    """None keeps the table in memory."""
    registry_path: Optional[str] = None
    ledger_path: Optional[str] = None


@dataclass
class BenchSettings:
    transfers: int = 50
    repeats: int = 10
    output_dir: str = "results"

    def __post_init__(self):
        if self.transfers < 1 or self.repeats < 1:
            raise ValueError("transfers and repeats must be at least 1")


@dataclass
class Settings:
    pairing: PairingSettings = field(default_factory=PairingSettings)
    network: NetworkSettings = field(default_factory=NetworkSettings)
    storage: StorageSettings = field(default_factory=StorageSettings)
    bench: BenchSettings = field(default_factory=BenchSettings)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Settings":
        return cls(
            pairing=PairingSettings(**(data.get("pairing") or {})),
            network=NetworkSettings(**(data.get("network") or {})),
            storage=StorageSettings(**(data.get("storage") or {})),
            bench=BenchSettings(**(data.get("bench") or {})),
        )


_ENV_OVERRIDES = {
    "EURO_BACKEND": ("pairing", "backend", str),
    "EURO_REGISTRY_PATH": ("storage", "registry_path", str),
    "EURO_LEDGER_PATH": ("storage", "ledger_path", str),
    "EURO_HOST": ("network", "host", str),
    "EURO_TTP_PORT": ("network", "ttp_port", int),
    "EURO_BANK_PORT": ("network", "bank_port", int),
    "EURO_BENCH_OUTPUT": ("bench", "output_dir", str),
}


def load_settings(path: Optional[Union[str, Path]] = None) -> Settings:
    """Read the YAML settings file (if present) and apply environment overrides."""
    load_dotenv()
    settings_path = Path(path) if path else DEFAULT_SETTINGS_PATH

    data: Dict[str, Any] = {}
    if settings_path.exists():
        try:
            with open(settings_path) as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            logging.error(f"Could not parse {settings_path}: {str(e)}")
            raise
    elif path:
        raise FileNotFoundError(f"Settings file not found: {settings_path}")

    for env_name, (section, key, cast) in _ENV_OVERRIDES.items():
        value = os.getenv(env_name)
        if value:
            data.setdefault(section, {})[key] = cast(value)

    return Settings.from_dict(data)
