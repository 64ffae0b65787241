"""Experiment orchestration: seed blocks, distributions, mirrored pairs, sweeps"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import (
    dataclass,
    field,
    replace,
)
from functools import partial
from typing import (
    Any,
    Dict,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Union,
)

import numpy as np

from seedfate.agents import (
    DEFAULT_EXPLORATION,
    DEFAULT_ROLLOUT_CAP,
    AgentConfig,
)
from seedfate.engine import (
    GameDef,
    SeedSet,
    derive_seed,
    play_game,
)
from seedfate.errors import (
    ConfigurationError,
    InvalidArgumentError,
    PlayoutError,
    SeedfateError,
)
from seedfate.games import build_game

__all__ = [
    "BlockResult",
    "BlockSpec",
    "MirroredPairResult",
    "SeedDistribution",
    "SkillSweep",
    "run_block",
    "run_disentangled",
    "run_distribution",
    "run_mirrored",
    "run_skill_sweep",
    "sample_game_seeds",
    "trace_block",
]

_logger = logging.getLogger(__name__)

# roles of derived seeds
SAMPLING, NONCE, MASTER, REDETERMINIZATION, AGENT, BOOTSTRAP, MIXTURE = range(7)

FIXED, ROTATE, MIRROR = "fixed", "rotate", "mirror"
POLICIES = (FIXED, ROTATE, MIRROR)
FRESH = "fresh"
SEEDINGS = (FRESH, FIXED)


@dataclass(frozen=True)
class BlockSpec:
    """Everything that is held constant across the seed blocks of a run.

    ``fixed_streams`` of None fixes the whole game chance via the master
    seed. A tuple of stream names fixes only those streams, all other
    chance is drawn freshly for every game.
    """

    game: Union[str, GameDef]
    agents: Tuple[AgentConfig, ...]
    n_games: int
    root_seed: int
    position_policy: str = FIXED
    fixed_streams: Optional[Tuple[str, ...]] = None
    agent_seeding: str = FRESH
    game_options: Mapping[str, Any] = field(default_factory=dict)
    record: bool = False

    def build(self):
        if isinstance(self.game, GameDef):
            return self.game
        return build_game(self.game, **self.game_options)

    @property
    def game_name(self):
        return self.game.name if isinstance(self.game, GameDef) else self.game

    def validate(self):
        game = self.build()
        if self.n_games < 1:
            raise InvalidArgumentError("n_games must be at least 1")
        if self.position_policy not in POLICIES:
            raise InvalidArgumentError(
                f"unknown position policy {self.position_policy!r}; "
                f"valid policies: {', '.join(POLICIES)}"
            )
        if self.agent_seeding not in SEEDINGS:
            raise InvalidArgumentError(
                f"unknown agent seeding {self.agent_seeding!r}; "
                f"valid seedings: {', '.join(SEEDINGS)}"
            )
        if self.position_policy == MIRROR and self.n_games % 2:
            raise InvalidArgumentError("mirrored blocks need an even n_games")
        if self.position_policy == ROTATE and self.n_games % game.seats:
            raise InvalidArgumentError(
                f"rotated blocks need n_games divisible by {game.seats} seats"
            )
        if len(self.agents) != game.seats:
            raise InvalidArgumentError(
                f"{game.name} has {game.seats} seats "
                f"but {len(self.agents)} agents were given"
            )
        if self.fixed_streams is not None:
            unknown = [s for s in self.fixed_streams if s not in game.stream_names]
            if unknown or not self.fixed_streams:
                raise ConfigurationError(
                    "fix_stream",
                    f"unknown stream(s) {', '.join(unknown) or '(none given)'} "
                    f"for game {game.name!r}; "
                    f"valid streams: {', '.join(game.stream_names) or 'none'}",
                )
        return game

    def to_dict(self):
        return {
            "game": self.game_name,
            "agents": [a.to_dict() for a in self.agents],
            "n_games": self.n_games,
            "root_seed": self.root_seed,
            "position_policy": self.position_policy,
            "fixed_streams": None
            if self.fixed_streams is None
            else list(self.fixed_streams),
            "agent_seeding": self.agent_seeding,
            "game_options": dict(self.game_options),
        }


@dataclass(frozen=True)
class BlockResult:
    game_seed: int
    seat_means: Tuple[float, ...]
    n_games: int
    draws: int = 0
    forced_draws: int = 0
    digests: Tuple[str, ...] = ()
    pair_scores: Tuple[float, ...] = ()
    traces: Tuple[Dict[str, Any], ...] = field(default=(), repr=False)


def _seating(policy, index, seats):
    """Agent index sitting at every seat for game ``index`` of a block.

    >>> _seating("fixed", 3, 2), _seating("mirror", 3, 2), _seating("rotate", 4, 3)
    ((0, 1), (1, 0), (1, 2, 0))
    """
    if policy == MIRROR and index % 2:
        return tuple(reversed(range(seats)))
    if policy == ROTATE:
        shift = index % seats
        return tuple((seat + shift) % seats for seat in range(seats))
    return tuple(range(seats))


def _seed_set(spec, game, game_seed, nonce, index, seating):
    # both games of a mirrored pair share their chance
    chance_index = index // 2 if spec.position_policy == MIRROR else index
    if spec.fixed_streams is None:
        master, overrides = game_seed, {}
    else:
        master = derive_seed(nonce, MASTER, chance_index)
        overrides = {name: game_seed for name in spec.fixed_streams}
    if spec.agent_seeding == FIXED:
        redet = derive_seed(spec.root_seed, REDETERMINIZATION)
        agent_seeds = tuple(spec.agents[a].agent_seed for a in seating)
    else:
        redet = derive_seed(nonce, REDETERMINIZATION, index)
        agent_seeds = tuple(
            derive_seed(nonce, AGENT, index, seat) for seat in range(game.seats)
        )
    return SeedSet(
        game_master_seed=master,
        redeterminization_seed=redet,
        agent_seeds=agent_seeds,
        stream_overrides=overrides,
    )


def run_block(spec: BlockSpec, game_seed: int) -> BlockResult:
    """Play ``spec.n_games`` games sharing the chance seed ``game_seed``.

    Redeterminization and agent seeds are derived per game from a block
    nonce, so a block is a pure function of the spec and its seed.

    :raises PlayoutError: a playout failed; carries seed and game index
    """
    game = spec.build()
    nonce = derive_seed(spec.root_seed, NONCE, game_seed)
    totals = np.zeros(game.seats)
    draws = forced = 0
    digests, pairs, traces = [], [], []
    pending = 0.0
    for index in range(spec.n_games):
        seating = _seating(spec.position_policy, index, game.seats)
        seeds = _seed_set(spec, game, game_seed, nonce, index, seating)
        agents = [spec.agents[a] for a in seating]
        try:
            outcome = play_game(game, seeds, agents, record=spec.record)
        except SeedfateError as ex:
            raise PlayoutError(game_seed, index, str(ex)) from ex
        totals += outcome.scores
        draws += max(outcome.scores) == 0.5
        forced += outcome.forced_draw
        digests.append(outcome.trace_digest)
        reference = outcome.scores[seating.index(0)]
        if spec.position_policy == MIRROR:
            if index % 2:
                pairs.append(pending + reference)
            else:
                pending = reference
        if spec.record:
            traces.append(
                {
                    "game_seed": game_seed,
                    "game_index": index,
                    "seeds": seeds.to_dict(),
                    "seating": list(seating),
                    "scores": list(outcome.scores),
                    "forced_draw": outcome.forced_draw,
                    "trace_digest": outcome.trace_digest,
                    "trace": outcome.trace,
                }
            )
    return BlockResult(
        game_seed=game_seed,
        seat_means=tuple(float(t) for t in totals / spec.n_games),
        n_games=spec.n_games,
        draws=draws,
        forced_draws=forced,
        digests=tuple(digests),
        pair_scores=tuple(pairs),
        traces=tuple(traces),
    )


def trace_block(spec: BlockSpec, game_seed: int):
    """Replay one block keeping the full trace of every game"""
    return run_block(replace(spec, record=True), game_seed).traces


def sample_game_seeds(root_seed, n_seeds):
    """The game seeds of an experiment.

    The list only depends on the root seed, every budget of a skill
    sweep therefore plays the identical seeds.

    >>> sample_game_seeds(7, 3)[:2] == sample_game_seeds(7, 2)
    True
    """
    return [derive_seed(root_seed, SAMPLING, block) for block in range(n_seeds)]


def _execute(spec, game_seeds, workers):
    run = partial(run_block, spec)
    if workers <= 1:
        yield from map(run, game_seeds)
        return
    with ProcessPoolExecutor(max_workers=workers) as pool:
        yield from pool.map(run, game_seeds, chunksize=1)


@dataclass(frozen=True)
class SeedDistribution:
    """First seat mean score per game seed."""

    seeds: Tuple[int, ...]
    win_rates: Tuple[float, ...]
    n_games: int
    game: str = ""
    agents: Tuple[AgentConfig, ...] = ()
    draws: Tuple[int, ...] = ()
    forced_draws: Tuple[int, ...] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)
    blocks: Tuple[BlockResult, ...] = field(default=(), compare=False, repr=False)
    spec: Optional[BlockSpec] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if len(self.seeds) != len(self.win_rates):
            raise InvalidArgumentError("one win rate per seed is required")
        if not self.win_rates:
            raise InvalidArgumentError("a seed distribution can not be empty")
        if self.n_games < 1:
            raise InvalidArgumentError("n_games must be at least 1")

    @classmethod
    def from_rates(cls, win_rates, n_games, seeds=None, **kwargs):
        """Distribution of given win rates, mainly for synthetic studies"""
        win_rates = tuple(float(w) for w in win_rates)
        seeds = tuple(range(len(win_rates))) if seeds is None else tuple(seeds)
        return cls(seeds=seeds, win_rates=win_rates, n_games=n_games, **kwargs)

    @property
    def grand_mean(self):
        return float(np.mean(self.win_rates))

    @property
    def n_seeds(self):
        return len(self.seeds)

    @property
    def draw_fraction(self):
        if not self.draws:
            return 0.0
        return sum(self.draws) / (self.n_games * len(self.seeds))

    def to_dict(self):
        return {
            "game": self.game,
            "n_seeds": self.n_seeds,
            "n_games": self.n_games,
            "grand_mean": self.grand_mean,
            "seeds": list(self.seeds),
            "win_rates": list(self.win_rates),
            "draws": list(self.draws),
            "forced_draws": list(self.forced_draws),
            "agents": [a.to_dict() for a in self.agents],
            "metadata": dict(self.metadata),
        }


def _distribution(spec, n_seeds, workers):
    game = spec.validate()
    seeds = sample_game_seeds(spec.root_seed, n_seeds)
    blocks = []
    for number, block in enumerate(_execute(spec, seeds, workers), start=1):
        _logger.info(
            "%s: block %d/%d game_seed=%d first seat %.3f",
            game.name,
            number,
            n_seeds,
            block.game_seed,
            block.seat_means[0],
        )
        blocks.append(block)
    return SeedDistribution(
        seeds=tuple(seeds),
        win_rates=tuple(b.seat_means[0] for b in blocks),
        n_games=spec.n_games,
        game=game.name,
        agents=spec.agents,
        draws=tuple(b.draws for b in blocks),
        forced_draws=tuple(b.forced_draws for b in blocks),
        metadata={
            "position_policy": spec.position_policy,
            "fixed_streams": None
            if spec.fixed_streams is None
            else list(spec.fixed_streams),
            "agent_seeding": spec.agent_seeding,
            "heterogeneous": _heterogeneous(spec.agents),
        },
        blocks=tuple(blocks),
        spec=spec,
    )


def _seats(game, game_options):
    if isinstance(game, GameDef):
        return game.seats
    return build_game(game, **game_options).seats


def _heterogeneous(agents):
    return len({(a.kind, a.budget) for a in agents}) > 1


def _check_seed_count(n_seeds):
    if n_seeds < 2:
        raise InvalidArgumentError(f"n_seeds must be at least 2, got {n_seeds}")


def run_distribution(
    game,
    n_seeds: int,
    n_games: int,
    agents: Sequence[AgentConfig],
    root_seed: int,
    workers: int = 1,
    **options,
) -> SeedDistribution:
    """Run one block for each of ``n_seeds`` sampled game seeds.

    :param game: game name or :class:`~seedfate.engine.GameDef`
    :param options: further :class:`BlockSpec` fields
    """
    _check_seed_count(n_seeds)
    spec = BlockSpec(
        game=game,
        agents=tuple(agents),
        n_games=n_games,
        root_seed=root_seed,
        **options,
    )
    return _distribution(spec, n_seeds, workers)


@dataclass(frozen=True)
class MirroredPairResult:
    """Score sum of the reference agent over every seat swapped pair"""

    seeds: Tuple[int, ...]
    pair_scores: Tuple[Tuple[float, ...], ...]
    n_pairs: int
    heterogeneous: bool = False

    def _pairs(self):
        return np.asarray(self.pair_scores, dtype=float).ravel()

    @property
    def pair_mean(self):
        return float(self._pairs().mean())

    @property
    def pair_variance(self):
        pairs = self._pairs()
        return float(pairs.var(ddof=1)) if pairs.size > 1 else 0.0

    @property
    def per_game_variance(self):
        return self.pair_variance / 2

    def to_dict(self):
        return {
            "n_pairs": self.n_pairs,
            "heterogeneous": self.heterogeneous,
            "pair_mean": self.pair_mean,
            "pair_variance": self.pair_variance,
            "per_game_variance": self.per_game_variance,
            "seeds": list(self.seeds),
            "pair_scores": [list(p) for p in self.pair_scores],
        }


def run_mirrored(game, n_seeds, n_pairs, agents, root_seed, workers=1, **options):
    """Play seat swapped pairs sharing the full game chance.

    :return: the pair result and the first seat distribution of the same games
    """
    if n_pairs < 1:
        raise InvalidArgumentError("n_pairs must be at least 1")
    distribution = run_distribution(
        game,
        n_seeds,
        2 * n_pairs,
        agents,
        root_seed,
        workers,
        position_policy=MIRROR,
        **options,
    )
    if distribution.metadata["heterogeneous"]:
        _logger.warning("mirrored pairs of agents with different kind or budget")
    pairs = MirroredPairResult(
        seeds=distribution.seeds,
        pair_scores=tuple(b.pair_scores for b in distribution.blocks),
        n_pairs=n_pairs,
        heterogeneous=distribution.metadata["heterogeneous"],
    )
    return pairs, distribution


@dataclass(frozen=True)
class SkillSweep:
    """Seed distributions along an ordered budget ladder"""

    budgets: Tuple[int, ...]
    distributions: Tuple[SeedDistribution, ...]

    @property
    def seeds(self):
        return self.distributions[0].seeds

    @property
    def win_rates(self):
        return tuple(d.win_rates for d in self.distributions)

    @property
    def n_games(self):
        return self.distributions[0].n_games

    def to_dict(self):
        return {
            "budgets": list(self.budgets),
            "seeds": list(self.seeds),
            "n_games": self.n_games,
            "win_rates": [list(r) for r in self.win_rates],
            "grand_means": [d.grand_mean for d in self.distributions],
        }


def run_skill_sweep(
    game,
    budgets,
    n_seeds,
    n_games,
    root_seed,
    workers=1,
    exploration=DEFAULT_EXPLORATION,
    rollout_depth_cap=DEFAULT_ROLLOUT_CAP,
    **options,
) -> SkillSweep:
    """Seed distributions for every budget, all seats sharing the budget.

    Budget ``0`` stands for random agents. Every budget plays the
    identical seed list.
    """
    budgets = tuple(budgets)
    if not budgets or any(b < 0 for b in budgets):
        raise InvalidArgumentError("budgets must be non-negative and not empty")
    if any(low >= high for low, high in zip(budgets, budgets[1:])):
        raise InvalidArgumentError(f"budgets must be strictly increasing: {budgets}")
    seats = _seats(game, options.get("game_options", {}))
    distributions = []
    for budget in budgets:
        agent = AgentConfig.for_budget(
            budget, exploration=exploration, rollout_depth_cap=rollout_depth_cap
        )
        _logger.info("budget %d", budget)
        distributions.append(
            run_distribution(
                game, n_seeds, n_games, [agent] * seats, root_seed, workers, **options
            )
        )
    return SkillSweep(budgets=budgets, distributions=tuple(distributions))


def run_disentangled(
    game, fixed_stream, n_seeds, n_games, agents, root_seed, workers=1, **options
) -> SeedDistribution:
    """Hold only the named chance stream(s) constant within each block.

    :param fixed_stream: a stream name or a sequence of stream names
    :raises ConfigurationError: a stream is not declared by the game
    """
    if isinstance(fixed_stream, str):
        fixed_stream = (fixed_stream,)
    return run_distribution(
        game,
        n_seeds,
        n_games,
        agents,
        root_seed,
        workers,
        fixed_streams=tuple(fixed_stream),
        **options,
    )
