import numpy as np
import pytest

from seedfate.runner import (
    SeedDistribution,
    SkillSweep,
)
from seedfate.stats import (
    nonmonotonic_seeds,
    verify_variance,
)

pytestmark = pytest.mark.acceptance

N_GAMES = 1000
N_SEEDS = 1000


@pytest.mark.parametrize("mixture", ["beta:2,5", "two-point:0.2,0.8", "point:0.5"])
def test_single_game_variance_collapses_to_a_bernoulli(mixture):
    checks = {c.name: c for c in verify_variance(mixture, 100_000, seed=1)}
    assert checks["single mean"].passed
    assert checks["single variance"].passed


@pytest.mark.parametrize("mixture", ["beta:2,5", "two-point:0.2,0.8", "point:0.5"])
def test_mirrored_pair_variance(mixture):
    checks = {c.name: c for c in verify_variance(mixture, 100_000, seed=2)}
    assert checks["pair mean"].passed
    assert checks["pair variance"].passed


def test_mirrored_pair_variance_of_decided_seeds_is_zero():
    checks = {c.name: c for c in verify_variance("two-point:0,1", 100_000)}
    assert checks["pair variance"].observed == 0.0


def test_mirrored_pair_variance_of_fair_seeds():
    checks = {c.name: c for c in verify_variance("point:0.5", 100_000, seed=3)}
    assert checks["pair variance"].observed == pytest.approx(0.5, abs=0.01)


def _planted_sweep(rate, seed):
    """Three budget sweep with ``rate`` of the seeds planted as non-monotonic"""
    rng = np.random.default_rng(seed)
    base = rng.uniform(0.3, 0.7, size=N_SEEDS)
    centre = base.copy()
    planted = rng.permutation(N_SEEDS)[: int(round(rate * N_SEEDS))]
    half = len(planted) // 2
    centre[planted[:half]] += 0.15
    centre[planted[half:]] -= 0.15
    distributions = tuple(
        SeedDistribution.from_rates(rng.binomial(N_GAMES, p) / N_GAMES, N_GAMES)
        for p in (base, centre, base)
    )
    return SkillSweep(budgets=(0, 64, 1024), distributions=distributions)


@pytest.mark.parametrize("rate", [0.0, 0.05, 0.15])
def test_planted_nonmonotonic_seeds_are_recovered(rate):
    report = nonmonotonic_seeds(_planted_sweep(rate, seed=int(rate * 100)))
    assert report.total_fraction == pytest.approx(rate, abs=0.02)


def test_null_sweeps_flag_few_seeds():
    for seed in range(10):
        report = nonmonotonic_seeds(_planted_sweep(0.0, seed=100 + seed))
        assert report.total_fraction <= 0.04
