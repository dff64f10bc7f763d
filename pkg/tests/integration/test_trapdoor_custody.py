import csv

import pytest

from src.core import crs as crs_module
from src.core.pairing import seeded_rng
from src.interface.network import TTP_LABEL
from src.tools.scenario import ScenarioConfig, scenario_double_spend, scenario_honest

SEED = 5


def _frames(path):
    with open(path, newline="") as f:
        return [(row["tag"], bytes.fromhex(row["frame"])) for row in csv.DictReader(f)]


def _trapdoor_pieces(params):
    """Every encoding of the TTP's trapdoor for the scenario seed."""
    _, trapdoor = crs_module.generate(params, seeded_rng(SEED, TTP_LABEL))
    return [
        params.encode_scalar(trapdoor.alpha),
        params.encode_scalar(trapdoor.beta),
        crs_module.trapdoor_to_bytes(trapdoor, params),
    ]


@pytest.mark.parametrize("transport", ["inproc", "socket"])
def test_honest_run_never_sends_the_trapdoor(params, tmp_path, transport):
    out = tmp_path / "honest.csv"
    report = scenario_honest(ScenarioConfig(transfers=2, seed=SEED, transport=transport, out=str(out)))
    assert report.passed, report.failure

    frames = _frames(out)
    assert "PARAMS_REP" in {tag for tag, _ in frames}
    for piece in _trapdoor_pieces(params):
        assert not any(piece in frame for _, frame in frames)


def test_revocation_run_never_sends_the_trapdoor(params, tmp_path):
    """The TTP opens the forked proofs itself; only the verdict leaves it."""
    out = tmp_path / "fork.csv"
    report = scenario_double_spend(ScenarioConfig(transfers=1, fork_at=0, seed=SEED, out=str(out)))
    assert report.passed, report.failure

    frames = _frames(out)
    assert [tag for tag, _ in frames].count("REVOKE_REP") == 1
    for piece in _trapdoor_pieces(params):
        assert not any(piece in frame for _, frame in frames)
