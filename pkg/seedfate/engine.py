"""Deterministic game execution: seeds, named chance streams and playouts"""

import abc
import logging
from dataclasses import (
    dataclass,
    field,
    replace,
)
from hashlib import blake2b
from typing import (
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
)

import numpy as np

from seedfate.errors import (
    ConfigurationError,
    ContractError,
    InvalidArgumentError,
    ProtocolError,
)

__all__ = [
    "SEED_LIMIT",
    "ChanceStream",
    "GameDef",
    "GameOutcome",
    "SeedSet",
    "derive_seed",
    "derive_stream",
    "open_streams",
    "play_game",
    "redeterminize",
    "stream_uniform",
]

_logger = logging.getLogger(__name__)

SEED_LIMIT = 2**64
DEFAULT_MAX_ROUNDS = 1000


def _check_seed(value, name="seed"):
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise InvalidArgumentError(f"{name} must be an integer, got {value!r}")
    if not 0 <= value < SEED_LIMIT:
        raise InvalidArgumentError(f"{name} must be a 64-bit unsigned integer")
    return int(value)


def _name_key(name):
    digest = blake2b(name.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def derive_seed(root, *path):
    """Derive a 64-bit seed from a root seed and a path of non-negative integers.

    The result is a pure function of its arguments, so any number of
    workers may derive the seeds of their own playouts independently.

    >>> derive_seed(42, 1, 2) == derive_seed(42, 1, 2)
    True
    >>> derive_seed(42, 1, 2) == derive_seed(42, 2, 1)
    False
    """
    sequence = np.random.SeedSequence(
        entropy=_check_seed(root, "root"), spawn_key=tuple(int(p) for p in path)
    )
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


class ChanceStream:
    """A named, independently seedable source of randomness.

    The stream wraps a counter based Philox generator. ``state`` exposes
    the full generator state together with the draw counter, so a
    stream can be stored and resumed.
    """

    def __init__(self, name, master_seed):
        self.name = name
        self.master_seed = master_seed
        sequence = np.random.SeedSequence(
            entropy=master_seed, spawn_key=(_name_key(name),)
        )
        self._generator = np.random.Generator(np.random.Philox(sequence))
        self.draw_count = 0
        self.journal = None

    @property
    def state(self):
        return {
            "name": self.name,
            "draw_count": self.draw_count,
            "generator": self._generator.bit_generator.state,
        }

    @state.setter
    def state(self, value):
        if value["name"] != self.name:
            raise InvalidArgumentError(
                f"state of stream {value['name']!r} "
                f"can not be loaded into {self.name!r}"
            )
        self._generator.bit_generator.state = value["generator"]
        self.draw_count = value["draw_count"]

    def uniform(self, bound):
        """Draw an integer uniformly from ``[0, bound)``"""
        if isinstance(bound, bool) or not isinstance(bound, (int, np.integer)):
            raise InvalidArgumentError(f"bound must be an integer, got {bound!r}")
        if bound < 1:
            raise InvalidArgumentError(f"bound must be positive, got {bound}")
        value = int(self._generator.integers(bound))
        self.draw_count += 1
        if self.journal is not None:
            self.journal.append((self.name, value))
        return value

    def shuffle(self, items):
        """Return a shuffled copy of items (Fisher-Yates, one draw per swap)"""
        items = list(items)
        for i in range(len(items) - 1, 0, -1):
            j = self.uniform(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def choice(self, items):
        return items[self.uniform(len(items))]

    def __repr__(self):
        return f"ChanceStream(name={self.name!r}, draw_count={self.draw_count})"


def derive_stream(master_seed, name):
    """Create the chance stream ``name`` of a game seeded with ``master_seed``.

    >>> a, b = derive_stream(42, "dice"), derive_stream(42, "dice")
    >>> [a.uniform(6) for _ in range(8)] == [b.uniform(6) for _ in range(8)]
    True
    """
    if not isinstance(name, str) or not name:
        raise InvalidArgumentError("stream name must be a non-empty string")
    return ChanceStream(name, _check_seed(master_seed, "master_seed"))


def stream_uniform(stream, bound):
    """Unbiased integer in ``[0, bound)`` drawn from ``stream``"""
    return stream.uniform(bound)


@dataclass(frozen=True)
class SeedSet:
    """All seeds which together make one game fully deterministic"""

    game_master_seed: int
    redeterminization_seed: int
    agent_seeds: Tuple[int, ...]
    stream_overrides: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        _check_seed(self.game_master_seed, "game_master_seed")
        _check_seed(self.redeterminization_seed, "redeterminization_seed")
        for seed in self.agent_seeds:
            _check_seed(seed, "agent_seeds")
        for name, seed in self.stream_overrides.items():
            _check_seed(seed, f"stream_overrides[{name}]")

    def validate(self, game):
        unknown = sorted(set(self.stream_overrides) - set(game.stream_names))
        if unknown:
            raise ConfigurationError(
                "stream_overrides",
                f"unknown stream(s) {', '.join(unknown)} for game {game.name!r}; "
                f"valid streams: {', '.join(game.stream_names) or 'none'}",
            )
        if len(self.agent_seeds) != game.seats:
            raise InvalidArgumentError(
                f"{game.name} has {game.seats} seats "
                f"but {len(self.agent_seeds)} agent seeds were given"
            )

    def to_dict(self):
        return {
            "game_master_seed": self.game_master_seed,
            "stream_overrides": dict(sorted(self.stream_overrides.items())),
            "redeterminization_seed": self.redeterminization_seed,
            "agent_seeds": list(self.agent_seeds),
        }


@dataclass(frozen=True)
class GameOutcome:
    """Final scores (win 1, draw 0.5, loss 0) and the digest of the game trace"""

    scores: Tuple[float, ...]
    trace_digest: str = ""
    decisions: int = 0
    forced_draw: bool = False
    trace: Optional[List[dict]] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        winners = [s for s in self.scores if s == 1.0]
        drawn = [s for s in self.scores if s == 0.5]
        rest = [s for s in self.scores if s not in (0.0, 0.5, 1.0)]
        valid = not rest and (
            (len(winners) == 1 and not drawn) or (not winners and len(drawn) >= 2)
        )
        if not valid:
            raise ContractError(f"invalid score vector {self.scores}")

    @classmethod
    def win(cls, seat, seats):
        return cls(tuple(1.0 if s == seat else 0.0 for s in range(seats)))

    @classmethod
    def draw(cls, seats, among=None):
        among = range(seats) if among is None else among
        return cls(tuple(0.5 if s in among else 0.0 for s in range(seats)))


@dataclass(frozen=True)
class GameDef(abc.ABC):
    """Forward model of a game.

    States are immutable. Transitions receive the chance streams as a
    mapping from stream name to :class:`ChanceStream` and must draw
    randomness from those streams only.
    """

    name: str = ""
    seats: int = 2
    stream_names: Tuple[str, ...] = ()
    max_rounds: int = DEFAULT_MAX_ROUNDS

    def __post_init__(self):
        if self.seats < 2:
            raise InvalidArgumentError(f"{self.name}: a game needs at least 2 seats")
        if len(set(self.stream_names)) != len(self.stream_names):
            raise InvalidArgumentError(f"{self.name}: duplicate stream names")
        if self.max_rounds < 1:
            raise InvalidArgumentError(f"{self.name}: max_rounds must be positive")

    @abc.abstractmethod
    def initial_state(self, streams):
        """Set up a new game, drawing any setup randomness from streams"""

    @abc.abstractmethod
    def current_seat(self, state):
        """Seat which has to decide in state"""

    @abc.abstractmethod
    def legal_actions(self, state):
        """Canonically ordered list of legal actions (small integers)"""

    @abc.abstractmethod
    def apply_action(self, state, action, streams):
        """Successor of state after action"""

    @abc.abstractmethod
    def scores(self, state):
        """Per seat scores of a terminal state, None while the game runs"""

    def terminal_outcome(self, state):
        scores = self.scores(state)
        return None if scores is None else GameOutcome(tuple(scores))

    def is_terminal(self, state):
        return self.scores(state) is not None

    def observe(self, state, seat):
        """The state as seen by seat, hidden information masked"""
        return state

    def redeterminize(self, state, observer, rng):
        """Sample a full state consistent with the information of observer"""
        return state

    def check_invariants(self, state):
        """Raise ContractError if state violates a rule invariant"""

    def describe_action(self, action):
        return str(action)


def open_streams(game, seeds):
    """Instantiate every declared chance stream of game for seeds"""
    return {
        name: derive_stream(
            seeds.stream_overrides.get(name, seeds.game_master_seed), name
        )
        for name in game.stream_names
    }


def redeterminize(game, state, observer, rng):
    """Resample everything observer can not see in state.

    Game chance streams are not touched, all randomness comes from rng.
    """
    if game.is_terminal(state):
        raise ContractError("can not redeterminize a terminal state")
    return game.redeterminize(state, observer, rng)


def _record(hasher, trace, seat, action, journal):
    draws = [f"{name}:{value}" for name, value in journal]
    hasher.update(f"{seat}|{action}|{' '.join(draws)}\n".encode("ascii"))
    if trace is not None:
        trace.append(
            {
                "seat": seat,
                "action": action,
                "draws": [[name, value] for name, value in journal],
            }
        )
    journal.clear()


def play_game(
    game: GameDef,
    seeds: SeedSet,
    agents: Sequence,
    record: bool = False,
) -> GameOutcome:
    """Play one complete game.

    Every chance event is drawn from the game's named streams, agents
    only receive observations and their own seeds. Replaying with the
    same seeds and agent configuration yields the same trace digest.

    :param game: the forward model
    :param seeds: the complete seed set of this playout
    :param agents: one agent configuration per seat; each must provide
        ``bind(seat, agent_seed, redeterminization_seed)`` returning an
        object with ``act(game, observation)``
    :param record: keep the full trace in the returned outcome
    :return: outcome with scores and trace digest
    """
    seeds.validate(game)
    if len(agents) != game.seats:
        raise InvalidArgumentError(
            f"{game.name} has {game.seats} seats but {len(agents)} agents were given"
        )
    streams = open_streams(game, seeds)
    journal: List[Tuple[str, int]] = []
    for stream in streams.values():
        stream.journal = journal
    hasher = blake2b(digest_size=8)
    trace: Optional[List[dict]] = [] if record else None

    state = game.initial_state(streams)
    _record(hasher, trace, -1, None, journal)
    players = [
        agent.bind(seat, seeds.agent_seeds[seat], seeds.redeterminization_seed)
        for seat, agent in enumerate(agents)
    ]

    decisions, forced = 0, False
    while True:
        outcome = game.terminal_outcome(state)
        if outcome is not None:
            break
        if decisions >= game.max_rounds:
            _logger.debug("%s: forced draw after %d decisions", game.name, decisions)
            outcome, forced = GameOutcome.draw(game.seats), True
            break
        seat = game.current_seat(state)
        action = players[seat].act(game, game.observe(state, seat))
        if action not in game.legal_actions(state):
            raise ProtocolError(seat, decisions, action)
        state = game.apply_action(state, action, streams)
        decisions += 1
        _record(hasher, trace, seat, action, journal)

    return replace(
        outcome,
        trace_digest=hasher.hexdigest(),
        decisions=decisions,
        forced_draw=forced,
        trace=trace,
    )


