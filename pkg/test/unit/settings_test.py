import argparse
from pathlib import Path

import pytest

from seedfate.errors import ConfigurationError
from seedfate.settings import (
    DEFAULT_LADDER,
    ExperimentConfig,
    Settings,
    merge_settings,
    resolve,
    settings_from,
)
from seedfate.stats import CATALOG


@pytest.mark.parametrize(
    "expected,obj",
    [
        (Settings(), {}),
        (Settings(game="kuhn"), {"game": "kuhn"}),
        (Settings(budgets=(0, 64)), {"budgets": (0, 64)}),
        (Settings(), {"game_options": None}),
        (
            Settings(game="connect4", quiet=True),
            argparse.Namespace(game="connect4", quiet=True),
        ),
    ],
)
def test_settings_from(expected, obj):
    assert expected == settings_from(obj)


def test_settings_from_rejects_other_types():
    with pytest.raises(TypeError):
        settings_from([("game", "kuhn")])


@pytest.mark.parametrize(
    "expected,lhs,rhs",
    [
        (
            Settings(game="kuhn", n_seeds=10),
            Settings(),
            Settings(game="kuhn", n_seeds=10),
        ),
        (
            Settings(game="kuhn", n_seeds=10),
            Settings(game="kuhn"),
            Settings(n_seeds=10),
        ),
        (
            Settings(game="connect4", n_seeds=10),
            Settings(game="kuhn", n_seeds=10),
            Settings(game="connect4"),
        ),
        (
            Settings(game_options={"stack": 6, "ante": 2}),
            Settings(game_options={"stack": 4, "ante": 2}),
            Settings(game_options={"stack": 6}),
        ),
    ],
)
def test_merge_settings(expected, lhs, rhs):
    assert expected == merge_settings(lhs, rhs)


def test_defaults_of_a_distribution():
    config = resolve(Settings(game="connect4", root_seed=1))
    assert config == ExperimentConfig(
        mode="distribution",
        root_seed=1,
        game="connect4",
        n_seeds=200,
        n_games=1000,
    )
    assert config.out == Path("seedfate-report")


@pytest.mark.parametrize(
    "preset,expected", [("desk", (50, 500)), ("paper", (200, 1000))]
)
def test_presets(preset, expected):
    config = resolve(Settings(game="kuhn", root_seed=1, preset=preset))
    assert (config.n_seeds, config.n_games) == expected


def test_explicit_values_win_over_the_preset():
    config = resolve(Settings(game="kuhn", root_seed=1, preset="desk", n_games=20))
    assert (config.n_seeds, config.n_games) == (50, 20)


def test_a_budget_selects_ismcts():
    config = resolve(Settings(game="kuhn", root_seed=1, budget=64))
    assert (config.agent, config.budget) == ("ismcts", 64)


def test_skill_sweep_uses_the_default_ladder():
    config = resolve(Settings(game="kuhn", root_seed=1, mode="skill-sweep"))
    assert config.budgets == DEFAULT_LADDER


def test_verify_variance_needs_no_game():
    config = resolve(Settings(mode="verify-variance", root_seed=3))
    assert config.mixtures == CATALOG
    assert config.game is None
    assert config.n_draws == 100_000


def test_max_rounds_becomes_a_game_option():
    config = resolve(
        Settings(game="kuhn", root_seed=1, max_rounds=30, game_options={"stack": 6})
    )
    assert config.options == {"stack": 6, "max_rounds": 30}


def test_disentangle_accepts_declared_streams():
    config = resolve(
        Settings(
            game="loveletter", root_seed=1, mode="disentangle", fix_stream=("deck",)
        )
    )
    assert config.fix_stream == ("deck",)


def test_config_echo_is_json_friendly():
    config = resolve(Settings(game="kuhn", root_seed=1, mode="skill-sweep"))
    echo = config.to_dict()
    assert echo["out"] == "seedfate-report"
    assert echo["budgets"] == list(DEFAULT_LADDER)
    assert echo["mode"] == "skill-sweep"


@pytest.mark.parametrize(
    "settings,field,message",
    [
        (Settings(game="kuhn"), "root_seed", "a root seed is required"),
        (
            Settings(game="kuhn", root_seed=2**64),
            "root_seed",
            "must be a 64-bit unsigned integer",
        ),
        (Settings(root_seed=1), "game", "required for mode distribution"),
        (
            Settings(game="chess", root_seed=1),
            "game",
            "unknown game 'chess'; valid games: cantstop, connect4, kuhn, loveletter",
        ),
        (
            Settings(game="kuhn", root_seed=1, mode="tournament"),
            "mode",
            "unknown mode 'tournament'; valid modes: distribution, skill-sweep, "
            "mirror, disentangle, nonmonotonic, verify-variance",
        ),
        (
            Settings(game="kuhn", root_seed=1, n_seeds=1),
            "n_seeds",
            "must be at least 2, got 1",
        ),
        (
            Settings(game="kuhn", root_seed=1, mode="mirror", n_games=5),
            "n_games",
            "mirror mode needs an even number of games",
        ),
        (
            Settings(game="kuhn", root_seed=1, agent="random", budget=5),
            "budget",
            "a random agent has budget 0",
        ),
        (
            Settings(game="kuhn", root_seed=1, agent="ismcts"),
            "budget",
            "an ismcts agent needs a positive budget",
        ),
        (
            Settings(game="kuhn", root_seed=1, mode="skill-sweep", budgets=(64, 16)),
            "budgets",
            "must be non-negative and strictly increasing: (64, 16)",
        ),
        (
            Settings(game="kuhn", root_seed=1, mode="nonmonotonic", budgets=(0, 16)),
            "budgets",
            "mode nonmonotonic needs at least 3 budgets",
        ),
        (
            Settings(
                game="loveletter",
                root_seed=1,
                mode="disentangle",
                fix_stream=("dice",),
            ),
            "fix_stream",
            "unknown stream(s) dice for game 'loveletter'; valid streams: burn, deck",
        ),
        (
            Settings(game="kuhn", root_seed=1, confidence=1.0),
            "confidence",
            "must lie in (0, 1), got 1.0",
        ),
        (
            Settings(game="kuhn", root_seed=1, preset="huge"),
            "preset",
            "unknown preset 'huge'; valid presets: desk, paper",
        ),
        (
            Settings(game="kuhn", root_seed=1, workers=0),
            "workers",
            "must be at least 1, got 0",
        ),
        (
            Settings(mode="verify-variance", root_seed=1, mixture="gauss:0,1"),
            "mixture",
            "unknown mixture 'gauss'; valid mixtures: point, two-point, beta",
        ),
    ],
)
def test_invalid_settings_name_the_field(settings, field, message):
    with pytest.raises(ConfigurationError) as info:
        resolve(settings)
    assert info.value.field == field
    assert info.value.message == message


@pytest.mark.parametrize(
    "options", [{"stack": 0}, {"name": "x"}, {"stream_names": ["deal"]}, {"blinds": 2}]
)
def test_invalid_game_options_are_configuration_errors(options):
    with pytest.raises(ConfigurationError) as info:
        resolve(Settings(game="kuhn", root_seed=1, game_options=options))
    assert info.value.field == "game_options"
