import pytest

from src.core.config import DEFAULT_SETTINGS_PATH, NetworkSettings, Settings, load_settings


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("EURO_BACKEND", "EURO_REGISTRY_PATH", "EURO_LEDGER_PATH", "EURO_HOST",
                 "EURO_TTP_PORT", "EURO_BANK_PORT", "EURO_BENCH_OUTPUT"):
        monkeypatch.delenv(name, raising=False)


def test_default_settings_file():
    assert DEFAULT_SETTINGS_PATH.exists()
    settings = load_settings()
    assert settings.pairing.backend == "bn254"
    assert settings.network.ttp_port == 7401
    assert settings.network.bank_port == 7402
    assert settings.storage.ledger_path is None
    assert settings.bench.transfers == 50
    assert settings.bench.repeats == 10


def test_environment_overrides_yaml(monkeypatch):
    monkeypatch.setenv("EURO_BACKEND", "bls12_381")
    monkeypatch.setenv("EURO_BANK_PORT", "9000")
    monkeypatch.setenv("EURO_LEDGER_PATH", "/tmp/ledger.db")
    settings = load_settings()
    assert settings.pairing.backend == "bls12_381"
    assert settings.network.bank_port == 9000
    assert settings.storage.ledger_path == "/tmp/ledger.db"


def test_explicit_file(tmp_path):
    path = tmp_path / "settings.yaml"
    path.write_text("network:\n  host: 10.0.0.1\nbench:\n  transfers: 5\n")
    settings = load_settings(path)
    assert settings.network.host == "10.0.0.1"
    assert settings.bench.transfers == 5
    # unspecified sections keep their defaults
    assert settings.pairing.backend == "bn254"


def test_missing_explicit_file_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_settings(tmp_path / "absent.yaml")


def test_invalid_values_rejected():
    with pytest.raises(ValueError):
        Settings.from_dict({"pairing": {"backend": "p256"}})
    with pytest.raises(ValueError):
        NetworkSettings(ttp_port=70000)
    with pytest.raises(ValueError):
        Settings.from_dict({"bench": {"repeats": 0}})
