"""Seeded decision makers: a uniform random agent and open-loop ISMCTS"""

import logging
import math
from dataclasses import (
    dataclass,
    field,
)
from typing import (
    Dict,
    List,
    Optional,
)

from seedfate.engine import (
    SEED_LIMIT,
    ChanceStream,
    derive_stream,
    redeterminize,
)
from seedfate.errors import (
    ContractError,
    InvalidArgumentError,
)

__all__ = [
    "AgentConfig",
    "Agent",
    "Node",
    "act",
    "ucb1_select",
]

_logger = logging.getLogger(__name__)

RANDOM = "random"
ISMCTS = "ismcts"
KINDS = (RANDOM, ISMCTS)
DEFAULT_EXPLORATION = math.sqrt(2)
DEFAULT_ROLLOUT_CAP = 200


@dataclass(frozen=True)
class AgentConfig:
    """Kind, skill and seed of an agent.

    The configuration is plain data so it can be echoed into reports and
    shipped to worker processes.
    """

    kind: str = RANDOM
    budget: int = 0
    exploration: float = DEFAULT_EXPLORATION
    rollout_depth_cap: int = DEFAULT_ROLLOUT_CAP
    agent_seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(
                f"unknown agent kind {self.kind!r}; valid kinds: {', '.join(KINDS)}"
            )
        if self.kind == RANDOM and self.budget != 0:
            raise InvalidArgumentError("a random agent has budget 0")
        if self.kind == ISMCTS and self.budget < 1:
            raise InvalidArgumentError("an ismcts agent needs a budget of at least 1")
        if self.exploration < 0:
            raise InvalidArgumentError("exploration must not be negative")
        if self.rollout_depth_cap < 1:
            raise InvalidArgumentError("rollout_depth_cap must be positive")
        if not 0 <= self.agent_seed < SEED_LIMIT:
            raise InvalidArgumentError("agent_seed must be a 64-bit unsigned integer")

    @classmethod
    def for_budget(cls, budget, **kwargs):
        """Random agent for budget 0, ISMCTS otherwise.

        >>> AgentConfig.for_budget(0).kind, AgentConfig.for_budget(64).kind
        ('random', 'ismcts')
        """
        return cls(kind=RANDOM if budget == 0 else ISMCTS, budget=budget, **kwargs)

    def bind(self, seat, agent_seed, redeterminization_seed):
        """Create the agent playing seat in one playout"""
        return Agent(
            config=self,
            seat=seat,
            rng=derive_stream(agent_seed, "agent"),
            redet_rng=derive_stream(redeterminization_seed, f"redeterminize-{seat}"),
        )

    def to_dict(self):
        return {
            "kind": self.kind,
            "budget": self.budget,
            "exploration": self.exploration,
            "rollout_depth_cap": self.rollout_depth_cap,
            "agent_seed": self.agent_seed,
        }


class Node:
    """Node of an open-loop search tree.

    Children are keyed by action, rewards are accumulated per seat.
    """

    __slots__ = ("children", "visits", "rewards")

    def __init__(self, seats):
        self.children: Dict[int, "Node"] = {}
        self.visits = 0
        self.rewards = [0.0] * seats

    def mean(self, seat):
        return self.rewards[seat] / self.visits

    def __repr__(self):
        return f"Node(visits={self.visits}, children={sorted(self.children)})"


def ucb1_select(node, c, seat=0, actions=None):
    """Index of the child to descend into.

    Unvisited children are selected first in canonical order, otherwise
    the child maximising ``mean + c * sqrt(ln N / n)`` wins, ties going to
    the lowest index.

    :param node: node whose children compete
    :param c: exploration constant
    :param seat: seat whose mean reward is maximised
    :param actions: candidate actions in canonical order, default all children
    """
    actions = sorted(node.children) if actions is None else actions
    children = [node.children.get(a) for a in actions]
    for index, child in enumerate(children):
        if child is None or child.visits == 0:
            return index
    log_parent = math.log(node.visits)
    best, best_value = 0, -math.inf
    for index, child in enumerate(children):
        value = child.mean(seat) + c * math.sqrt(log_parent / child.visits)
        if value > best_value:
            best, best_value = index, value
    return best


def _rollout(game, state, streams, rng, cap):
    for _ in range(cap):
        scores = game.scores(state)
        if scores is not None:
            return scores
        state = game.apply_action(state, rng.choice(game.legal_actions(state)), streams)
    scores = game.scores(state)
    return scores if scores is not None else (0.5,) * game.seats


def _iterate(config, game, root, observation, seat, redet_rng, rng, streams):
    state = redeterminize(game, observation, seat, redet_rng)
    node, path = root, [root]
    while not game.is_terminal(state):
        actions = game.legal_actions(state)
        untried = [a for a in actions if a not in node.children]
        if untried:
            child = node.children[untried[0]] = Node(game.seats)
            state = game.apply_action(state, untried[0], streams)
            path.append(child)
            break
        mover = game.current_seat(state)
        action = actions[ucb1_select(node, config.exploration, mover, actions)]
        node = node.children[action]
        state = game.apply_action(state, action, streams)
        path.append(node)
    scores = _rollout(game, state, streams, rng, config.rollout_depth_cap)
    for visited in path:
        visited.visits += 1
        for s, score in enumerate(scores):
            visited.rewards[s] += score


def _search(config, game, observation, redet_rng, rng):
    seat = game.current_seat(observation)
    root = Node(game.seats)
    # chance inside the search is simulated with the agent's own stream
    streams = {name: rng for name in game.stream_names}
    for _ in range(config.budget):
        _iterate(config, game, root, observation, seat, redet_rng, rng, streams)
    best, most = None, -1
    for action in sorted(root.children):
        if root.children[action].visits > most:
            best, most = action, root.children[action].visits
    return best, root


def act(config, game, observation, redet_rng, rng=None):
    """Choose an action for the seat to move in observation.

    :param config: the :class:`AgentConfig`
    :param game: forward model
    :param observation: the state as seen by the deciding seat
    :param redet_rng: stream used to resample hidden information
    :param rng: the agent's own stream, derived from ``config.agent_seed`` if omitted
    :return: a legal action
    """
    if game.is_terminal(observation):
        raise ContractError(f"{game.name}: can not act in a terminal state")
    rng = derive_stream(config.agent_seed, "agent") if rng is None else rng
    if config.kind == RANDOM:
        return rng.choice(game.legal_actions(observation))
    action, _ = _search(config, game, observation, redet_rng, rng)
    return action


@dataclass
class Agent:
    """An agent bound to one seat of one playout"""

    config: AgentConfig
    seat: int
    rng: ChanceStream
    redet_rng: ChanceStream
    iterations: List[int] = field(default_factory=list)
    last_tree: Optional[Node] = field(default=None, repr=False)

    def act(self, game, observation):
        if game.is_terminal(observation):
            raise ContractError(f"{game.name}: can not act in a terminal state")
        if self.config.kind == RANDOM:
            self.iterations.append(0)
            return self.rng.choice(game.legal_actions(observation))
        action, root = _search(self.config, game, observation, self.redet_rng, self.rng)
        self.iterations.append(root.visits)
        self.last_tree = root
        if _logger.isEnabledFor(logging.DEBUG):
            _logger.debug(
                "seat %d chose %s after %d iterations",
                self.seat,
                game.describe_action(action),
                root.visits,
            )
        return action
