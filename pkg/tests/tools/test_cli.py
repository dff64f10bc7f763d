import pytest

from src.core import crs as crs_module
from src.core.crs import CommonReferenceString
from src.core.pairing import seeded_rng
from src.tools import cli


def test_parser_subcommands():
    parser = cli.build_parser()
    args = parser.parse_args(["scenario", "double-spend", "--transfers", "6", "--fork-at", "3"])
    assert (args.role, args.action) == ("scenario", "double-spend")
    assert args.transfers == 6
    assert args.fork_at == 3
    assert args.transport == "inproc"
    assert set(cli.COMMANDS) == {
        ("params", "init"), ("ttp", "serve"), ("bank", "serve"), ("user", "run"),
        ("scenario", "honest"), ("scenario", "double-spend"), ("bench", "growth"), ("bench", "verify"),
    }
    with pytest.raises(SystemExit):
        parser.parse_args(["scenario", "honest", "--transport", "pigeon"])


def test_params_init_writes_crs_and_trapdoor(params, tmp_path):
    params_dir = tmp_path / "params"
    assert cli.main(["params", "init", "--params-dir", str(params_dir), "--seed", "7"]) == 0
    crs = CommonReferenceString.from_bytes((params_dir / cli.CRS_FILE).read_bytes(), params)
    expected, trapdoor = crs_module.generate(params, seeded_rng(7, "ttp"))
    assert crs == expected
    loaded = crs_module.trapdoor_from_bytes((params_dir / cli.TRAPDOOR_FILE).read_bytes(), params)
    assert loaded == trapdoor


def test_scenario_honest_exit_code(tmp_path):
    out = tmp_path / "run.csv"
    assert cli.main(["scenario", "honest", "--transfers", "1", "--out", str(out)]) == 0
    assert out.exists()


def test_double_spend_without_mode_is_an_error():
    assert cli.main(["scenario", "double-spend", "--transfers", "1"]) == 2


def test_bench_growth_exit_code(tmp_path):
    out = tmp_path / "growth.csv"
    assert cli.main(["bench", "growth", "--transfers", "2", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "index,bytes"


def test_missing_config_file_is_an_error(tmp_path):
    assert cli.main(["--config", str(tmp_path / "absent.yaml"), "scenario", "honest", "--transfers", "1"]) == 2
