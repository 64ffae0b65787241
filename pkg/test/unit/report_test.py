import json

from seedfate.report import (
    write_histogram,
    write_report,
    write_seeds,
    write_sweep,
    write_traces,
)
from seedfate.runner import (
    SeedDistribution,
    SkillSweep,
)


def test_seed_rows_keep_full_precision(tmp_path):
    distribution = SeedDistribution.from_rates(
        [1 / 3, 0.5], n_games=3, seeds=(17, 4)
    )
    path = write_seeds(tmp_path, distribution)
    assert path.read_text() == (
        "seed,win_rate,n_games\n17,0.3333333333333333,3\n4,0.5,3\n"
    )


def test_histogram_rows(tmp_path):
    rows = write_histogram(tmp_path, [0.0, 0.01, 1.0]).read_text().splitlines()
    assert rows[1] == "0.0,0.02,2"
    assert rows[-1] == "0.98,1.0,1"


def test_sweep_rows_are_grouped_by_budget(tmp_path):
    sweep = SkillSweep(
        budgets=(0, 8),
        distributions=(
            SeedDistribution.from_rates([0.25, 0.75], n_games=4),
            SeedDistribution.from_rates([0.5, 1.0], n_games=4),
        ),
    )
    rows = write_sweep(tmp_path, sweep).read_text().splitlines()
    assert rows == [
        "budget,seed,win_rate,n_games",
        "0,0,0.25,4",
        "0,1,0.75,4",
        "8,0,0.5,4",
        "8,1,1.0,4",
    ]


def test_report_echoes_version_and_config(tmp_path):
    path = write_report(
        tmp_path / "new", "1.2.3", {"root_seed": 5}, {"mode": "distribution"}
    )
    text = path.read_text()
    assert text.endswith("}\n")
    assert json.loads(text) == {
        "version": "1.2.3",
        "config": {"root_seed": 5},
        "mode": "distribution",
    }


def test_traces_are_json_lines_with_sorted_keys(tmp_path):
    path = write_traces(tmp_path, [{"b": 1, "a": 2}, {"c": [1, 2]}])
    assert path.read_text() == '{"a": 2, "b": 1}\n{"c": [1, 2]}\n'
