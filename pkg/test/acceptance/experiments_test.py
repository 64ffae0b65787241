import os

import numpy as np
import pytest

from seedfate.agents import AgentConfig
from seedfate.cli import main
from seedfate.engine import (
    SeedSet,
    play_game,
)
from seedfate.games import (
    GAMES,
    build_game,
)
from seedfate.report import SEEDS
from seedfate.runner import (
    run_disentangled,
    run_distribution,
    run_mirrored,
    run_skill_sweep,
)
from seedfate.stats import (
    binomial_interval,
    bootstrap_ci,
    entropy,
    metrics,
    outlier_fraction,
    span,
    trimmed_span,
)

pytestmark = pytest.mark.acceptance

WORKERS = os.cpu_count() or 1
RANDOM = AgentConfig()


def ismcts(budget):
    return AgentConfig(kind="ismcts", budget=budget)


@pytest.mark.parametrize("name", sorted(GAMES))
def test_replays_are_identical(name):
    game = build_game(name)
    agents = [ismcts(16)] * game.seats
    seeds = SeedSet(11, 12, (13, 14))
    digests = {play_game(game, seeds, agents).trace_digest for _ in range(10)}
    assert len(digests) == 1


def test_worker_count_does_not_change_the_seed_file(tmp_path):
    outputs = []
    for workers in (1, 4, 16):
        out = tmp_path / str(workers)
        status = main(
            [
                "-q",
                "--game=kuhn",
                "--budget=8",
                "--seeds=16",
                "--games=10",
                "--root-seed=2024",
                f"--workers={workers}",
                f"--out={out}",
            ]
        )
        assert status == 0
        outputs.append((out / SEEDS).read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_random_cantstop_matches_its_long_run_mean():
    oracle = run_distribution(
        "cantstop", 100_000, 1, [RANDOM, RANDOM], root_seed=1, workers=WORKERS
    )
    sample = run_distribution(
        "cantstop", 2000, 1, [RANDOM, RANDOM], root_seed=2, workers=WORKERS
    )
    lo, hi = binomial_interval(2000, oracle.grand_mean, 0.99)
    assert lo <= sample.grand_mean <= hi


def test_connect4_is_a_null_control():
    distribution = run_distribution(
        "connect4", 50, 500, [ismcts(64)] * 2, root_seed=4, workers=WORKERS
    )
    assert outlier_fraction(distribution) <= 0.06
    assert trimmed_span(distribution) <= 0.10


def test_kuhn_matches_are_bimodal():
    distribution = run_distribution(
        "kuhn", 50, 300, [ismcts(1024)] * 2, root_seed=5, workers=WORKERS
    )
    rates = np.asarray(distribution.win_rates)
    assert span(rates) >= 0.8
    # unimodal control with the same span
    control = rates.min() + span(rates) * np.sort(
        np.random.default_rng(0).beta(4, 4, size=rates.size)
    )
    control[0], control[-1] = rates.min(), rates.max()
    assert entropy(rates) < entropy(control)


@pytest.mark.parametrize("name", ["cantstop", "kuhn"])
def test_skill_widens_the_seed_distribution(name):
    sweep = run_skill_sweep(
        name, (0, 64, 1024), n_seeds=30, n_games=300, root_seed=6, workers=WORKERS
    )
    weakest, strongest = sweep.distributions[0], sweep.distributions[-1]
    assert trimmed_span(strongest) > trimmed_span(weakest)
    low = bootstrap_ci(trimmed_span, weakest.win_rates, n_boot=10_000, boot_seed=1)
    high = bootstrap_ci(trimmed_span, strongest.win_rates, n_boot=10_000, boot_seed=1)
    assert low[1] < high[0]


@pytest.mark.parametrize("name", ["cantstop", "kuhn"])
def test_the_larger_budget_wins_a_round_robin(name):
    pairs, _ = run_mirrored(
        name, 250, 1, [ismcts(1024), ismcts(16)], root_seed=8, workers=WORKERS
    )
    win_rate = pairs.pair_mean / 2
    _, fair_high = binomial_interval(500, 0.5, 0.99)
    assert win_rate > 0.55
    assert win_rate > fair_high


def test_a_stream_explains_no_more_than_all_chance():
    agents = [ismcts(256)] * 2

    def disentangled(streams):
        return run_disentangled(
            "loveletter", streams, 50, 300, agents, root_seed=7, workers=WORKERS
        )

    whole = run_distribution(
        "loveletter", 50, 300, agents, root_seed=7, workers=WORKERS
    )
    limit = outlier_fraction(whole) + 0.05
    assert outlier_fraction(disentangled("burn")) <= limit
    assert outlier_fraction(disentangled("deck")) <= limit
    both = disentangled(("burn", "deck"))
    assert both.win_rates == whole.win_rates
    assert metrics(both) == metrics(whole)
