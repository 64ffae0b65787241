import json
from collections import namedtuple
from pathlib import Path

import pytest

from seedfate.cli import (
    VERSION,
    ExitCode,
    _ArgumentParser,
    load,
    main,
)
from seedfate.errors import ConfigurationError
from seedfate.report import (
    HISTOGRAM,
    REPORT,
    SEEDS,
    SWEEP,
    TRACES,
)

Configuration = namedtuple("Configuration", ("expected", "filename", "content"))

OPTIONS = _ArgumentParser.create_parser().options

CONFIG_KEYS = {
    "agent",
    "budget",
    "budgets",
    "confidence",
    "dump_traces",
    "exploration",
    "fix_stream",
    "game",
    "game_options",
    "max_rounds",
    "mixtures",
    "mode",
    "n_boot",
    "n_draws",
    "n_games",
    "n_seeds",
    "out",
    "root_seed",
    "rollout_cap",
    "trim",
    "workers",
}

CONFIGURATIONS = (
    Configuration(expected={}, filename="empty.json", content="{}"),
    Configuration(
        expected={"game": "kuhn", "n_seeds": 10, "budgets": (0, 64)},
        filename="sweep.json",
        content='{"game": "kuhn", "n_seeds": 10, "budgets": [0, 64]}',
    ),
    Configuration(
        expected={"budgets": (0, 16), "fix_stream": ("burn", "deck")},
        filename="strings.json",
        content='{"budgets": "0,16", "fix_stream": "burn,deck"}',
    ),
    Configuration(
        expected={"out": Path("runs/a"), "confidence": 0.5},
        filename="paths.json",
        content='{"out": "runs/a", "confidence": 0.5}',
    ),
    Configuration(
        expected={"game_options": {"stack": 6}, "dump_traces": True},
        filename="options.json",
        content='{"game_options": {"stack": 6}, "dump_traces": true}',
    ),
)


@pytest.fixture
def config_file(tmp_path, request):
    name, content = request.param
    file = tmp_path / name
    with open(file, "w") as f:
        f.write(content)
    yield file


def run_cli(*argv):
    return main([str(arg) for arg in argv])


def experiment(out, flags, root_seed=3):
    """Run a quiet experiment described by a flag string"""
    return run_cli("-q", *flags.split(), "--root-seed", root_seed, "--out", out)


def report_of(out):
    return json.loads((out / REPORT).read_text(encoding="utf-8"))


def test_argument_parser_collects_options():
    parser = _ArgumentParser()
    parser.add_argument("-o", "--option", action="store_true")
    parser.add_argument("-i", "--iflag", action="store_true")
    parser.add_argument(
        "-f",
        "--flag",
    )
    parser.add_argument("--count", type=int)

    def rule(e):
        _type, name = e
        return name

    expected = sorted(
        (
            (bool, "option"),
            (bool, "iflag"),
            (None, "flag"),
            (int, "count"),
        ),
        key=rule,
    )
    assert expected == sorted(parser.options, key=rule)


@pytest.mark.parametrize("preset", ["desk", "paper"])
def test_presets_are_accepted_on_the_command_line(preset):
    args = _ArgumentParser.create_parser().parse_args(["--preset", preset])
    assert args.preset == preset


@pytest.mark.parametrize(
    "config_file,expected",
    (((c.filename, c.content), c.expected) for c in CONFIGURATIONS),
    indirect=["config_file"],
)
def test_load_config(config_file, expected):
    assert expected == load(config_file, OPTIONS)


@pytest.mark.parametrize(
    "config_file,field,message",
    [
        (("a.json", '{"seeds": 10}'), "seeds", "unknown configuration key"),
        (("b.json", '{"quiet": true}'), "quiet", "unknown configuration key"),
        (("c.json", '{"n_seeds": "10"}'), "n_seeds", "invalid integer value: '10'"),
        (("d.json", '{"n_seeds": true}'), "n_seeds", "invalid integer value: True"),
        (("e.json", '{"dump_traces": 1}'), "dump_traces", "invalid boolean value: 1"),
        (("f.json", '{"budgets": "0,x"}'), "budgets", "invalid budget ladder: '0,x'"),
        (("g.json", '{"game": 4}'), "game", "invalid value: 4"),
        (("h.json", "[1, 2]"), "config", "expected a JSON object"),
    ],
    indirect=["config_file"],
)
def test_load_config_fails_on_incompatible_values(config_file, field, message):
    with pytest.raises(ConfigurationError) as info:
        load(config_file, OPTIONS)
    assert info.value.field == field
    assert info.value.message.endswith(message)


def test_load_config_fails_on_invalid_json(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"game": ')
    with pytest.raises(ConfigurationError) as info:
        load(broken, OPTIONS)
    assert info.value.field == "config"
    assert "invalid JSON" in info.value.message


def test_load_config_fails_on_missing_file(tmp_path):
    with pytest.raises(ConfigurationError) as info:
        load(tmp_path / "missing.json", OPTIONS)
    assert info.value.field == "config"


def test_distribution_report(tmp_path, capsys):
    out = tmp_path / "report"
    status = run_cli(
        "--game", "kuhn", "--seeds", 3, "--games", 4, "--root-seed", 7, "--out", out
    )
    assert status == ExitCode.SUCCESS
    report = report_of(out)
    assert set(report) == {
        "config",
        "distribution",
        "metrics",
        "mode",
        "variance_reduction",
        "version",
    }
    assert set(report["config"]) == CONFIG_KEYS
    assert report["version"] == VERSION
    assert report["mode"] == "distribution"
    assert report["config"]["root_seed"] == 7
    assert len(report["distribution"]["win_rates"]) == 3
    seeds = (out / SEEDS).read_text().splitlines()
    assert seeds[0] == "seed,win_rate,n_games"
    assert len(seeds) == 4
    histogram = (out / HISTOGRAM).read_text().splitlines()
    assert histogram[0] == "bucket_lo,bucket_hi,count"
    assert len(histogram) == 51
    stdout = capsys.readouterr().out
    assert "seedfate distribution" in stdout
    assert "trimmed_span" in stdout


def test_reruns_and_worker_counts_reproduce_the_seed_file(tmp_path):
    outputs = []
    for name, workers in (("a", 1), ("b", 1), ("c", 2)):
        out = tmp_path / name
        status = run_cli(
            "-q",
            "--game",
            "cantstop",
            "--seeds",
            4,
            "--games",
            2,
            "--root-seed",
            11,
            "--workers",
            workers,
            "--out",
            out,
        )
        assert status == ExitCode.SUCCESS
        outputs.append((out / SEEDS).read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_flags_override_the_config_file(tmp_path):
    config = tmp_path / "experiment.json"
    config.write_text(
        json.dumps({"game": "connect4", "n_seeds": 2, "n_games": 2, "root_seed": 5})
    )
    out = tmp_path / "out"
    status = run_cli("-q", "--config", config, "--game", "kuhn", "--out", out)
    assert status == ExitCode.SUCCESS
    echo = report_of(out)["config"]
    assert (echo["game"], echo["n_seeds"], echo["root_seed"]) == ("kuhn", 2, 5)


def test_game_options_reach_the_game(tmp_path):
    out = tmp_path / "out"
    status = run_cli(
        "-q",
        "--game=kuhn",
        "--seeds=2",
        "--games=2",
        "--root-seed=1",
        "--game-option",
        "max_hands=1",
        "--out",
        out,
    )
    assert status == ExitCode.SUCCESS
    assert report_of(out)["config"]["game_options"] == {"max_hands": 1}


def test_unknown_stream_is_a_field_level_error(tmp_path, capsys):
    status = run_cli(
        "--game",
        "loveletter",
        "--mode",
        "disentangle",
        "--fix-stream",
        "dice",
        "--root-seed",
        1,
        "--out",
        tmp_path,
    )
    assert status == ExitCode.CONFIG_ERROR
    assert capsys.readouterr().err == (
        "seedfate: error: fix_stream: unknown stream(s) dice for game "
        "'loveletter'; valid streams: burn, deck\n"
    )
    assert not (tmp_path / REPORT).exists()


def test_missing_root_seed(tmp_path, capsys):
    assert run_cli("--game", "kuhn", "--out", tmp_path) == ExitCode.CONFIG_ERROR
    assert capsys.readouterr().err == (
        "seedfate: error: root_seed: a root seed is required\n"
    )


def test_protected_game_option_is_a_configuration_error(tmp_path, capsys):
    status = experiment(tmp_path, "--game kuhn --game-option name=x")
    assert status == ExitCode.CONFIG_ERROR
    assert capsys.readouterr().err == (
        "seedfate: error: game_options: name can not be overridden\n"
    )


def test_debug_and_quiet_are_mutually_exclusive(capsys):
    assert run_cli("--debug", "-q", "--root-seed", 1) == ExitCode.CONFIG_ERROR
    assert capsys.readouterr().err == (
        "seedfate: error: options --debug and --quiet are mutually exclusive\n"
    )


def test_unwritable_output_is_a_runtime_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    status = run_cli(
        "--game", "kuhn", "--seeds", 2, "--games", 2, "--root-seed", 1, "--out", blocker
    )
    assert status == ExitCode.RUNTIME_ERROR
    assert capsys.readouterr().err.startswith("seedfate: error: out: ")


def test_mirror_report(tmp_path):
    out = tmp_path / "out"
    status = experiment(out, "--game kuhn --mode mirror --seeds 3 --games 4")
    assert status == ExitCode.SUCCESS
    pairs = report_of(out)["pairs"]
    assert pairs["n_pairs"] == 2
    assert len(pairs["pair_scores"]) == 3


def test_skill_sweep_report(tmp_path):
    out = tmp_path / "out"
    status = experiment(
        out, "--game kuhn --mode skill-sweep --budgets 0,4 --seeds 2 --games 2 --boot 9"
    )
    assert status == ExitCode.SUCCESS
    report = report_of(out)
    assert [level["budget"] for level in report["levels"]] == [0, 4]
    assert report["sweep"]["budgets"] == [0, 4]
    rows = (out / SWEEP).read_text().splitlines()
    assert rows[0] == "budget,seed,win_rate,n_games"
    assert len(rows) == 5


def test_nonmonotonic_report(tmp_path):
    out = tmp_path / "out"
    status = experiment(
        out, "--game kuhn --mode nonmonotonic --budgets 0,2,4 --seeds 2 --games 2"
    )
    assert status == ExitCode.SUCCESS
    nonmonotonic = report_of(out)["nonmonotonic"]
    assert nonmonotonic["interior_budgets"] == [2]
    assert len(nonmonotonic["flags"]) == 1


def test_disentangle_report(tmp_path):
    out = tmp_path / "out"
    status = experiment(
        out,
        "--game loveletter --mode disentangle --fix-stream deck --seeds 2 --games 2",
    )
    assert status == ExitCode.SUCCESS
    metadata = report_of(out)["distribution"]["metadata"]
    assert metadata["fixed_streams"] == ["deck"]


def test_dumped_traces(tmp_path):
    out = tmp_path / "out"
    status = experiment(out, "--game connect4 --seeds 2 --games 3 --dump-traces")
    assert status == ExitCode.SUCCESS
    traces = [json.loads(line) for line in (out / TRACES).read_text().splitlines()]
    assert [t["game_index"] for t in traces] == [0, 1, 2]


def test_verify_variance_report(tmp_path, capsys):
    out = tmp_path / "out"
    status = run_cli(
        "--mode",
        "verify-variance",
        "--mixture",
        "two-point:0,1",
        "--draws",
        1000,
        "--root-seed",
        3,
        "--out",
        out,
    )
    assert status in (ExitCode.SUCCESS, ExitCode.CHECK_FAILED)
    checks = report_of(out)["checks"]
    assert [c["name"] for c in checks] == [
        "single mean",
        "single variance",
        "pair mean",
        "pair variance",
    ]
    assert status == (
        ExitCode.SUCCESS if all(c["passed"] for c in checks) else ExitCode.CHECK_FAILED
    )
    assert "two-point:0,1 pair variance" in capsys.readouterr().out
