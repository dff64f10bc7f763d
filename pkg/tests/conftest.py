import logging

import pytest

from src.core import crs as crs_module
from src.core import schnorr, token
from src.core.pairing import load_group, seeded_rng
from src.core.token import WalletEntry
from src.interface.bank import BankState
from src.interface.ttp import BANK_IDENTITY, TtpState
from src.interface.user import UserState
from src.tools.bench import build_chain

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(message)s')

BACKEND = "bn254"


@pytest.fixture(scope="session")
def params():
    """Shared pairing parameters (py_ecc BN254)."""
    return load_group(BACKEND)


@pytest.fixture(scope="session")
def crs_pair(params):
    return crs_module.generate(params, seeded_rng(7, "ttp"))


@pytest.fixture(scope="session")
def crs(crs_pair):
    return crs_pair[0]


@pytest.fixture(scope="session")
def trapdoor(crs_pair):
    return crs_pair[1]


@pytest.fixture
def rng():
    return seeded_rng(1, "test")


@pytest.fixture(scope="session")
def bank_keys(params):
    return schnorr.keygen(params, seeded_rng(7, "bank"))


def withdraw_entry(params, bank_keys, rng):
    """A freshly withdrawn wallet entry, issued with the three-round blind protocol."""
    request = token.withdrawal_prepare(params, rng)
    nonce = schnorr.blind_round1_signer(params, rng)
    session, c_prime = schnorr.blind_round2_client(nonce.r, request.message, bank_keys.pk, rng)
    sig = schnorr.unblind(session, schnorr.blind_round3_signer(nonce, c_prime, bank_keys.sk))
    return WalletEntry(token.DigitalEuro(request.serial_number, request.theta1_w, sig), request.t0)


@pytest.fixture
def withdrawn(params, bank_keys, rng):
    return withdraw_entry(params, bank_keys, rng)


@pytest.fixture(scope="session")
def short_chain(params):
    """Two honest transfers, built without verification."""
    return build_chain(params, 2, seed=3)


@pytest.fixture
def parties(params):
    """TTP, bank (revoking through the TTP directly) and a user factory, all in process."""
    ttp = TtpState.setup(params, seeded_rng(11, "ttp"))
    bank = BankState.create(params, ttp.crs, ttp.revoke, seeded_rng(11, "bank"))
    ttp.register(BANK_IDENTITY, bank.pk)

    def make_user(name):
        user = UserState.create(name, params, ttp.crs, bank.pk, seeded_rng(11, name))
        ttp.register(name, user.pk)
        bank.register_user(name, user.pk)
        return user

    yield ttp, bank, make_user
    bank.ledger.close()
    ttp.registry.close()
