"""Kuhn poker played as a short-stacked match, the bimodal poker analogue.

Cards are ``1`` (Jack), ``2`` (Queen) and ``3`` (King). Betting actions
are ``0`` check, ``1`` bet, ``2`` call and ``3`` fold. Every hand both
seats ante, the first actor alternates between hands, and the match ends
when a stack is empty or after ``max_hands`` hands. The larger stack wins
the match, equal stacks draw.

Both hole cards of a hand are drawn from the chance stream ``deal``.

The module also carries an exact solver of the single ante-1/bet-1 hand
(:func:`solve_hand`, :func:`best_response`) used as a rules oracle.
"""

from dataclasses import (
    dataclass,
    field,
    replace,
)
from fractions import Fraction
from itertools import product
from typing import (
    Dict,
    Tuple,
)

import numpy as np
from scipy.optimize import linprog

from seedfate.engine import GameDef
from seedfate.errors import (
    ContractError,
    InvalidArgumentError,
)

JACK, QUEEN, KING = 1, 2, 3
CARDS = (JACK, QUEEN, KING)
CHECK, BET, CALL, FOLD = range(4)
ACTION_NAMES = {CHECK: "check", BET: "bet", CALL: "call", FOLD: "fold"}
HIDDEN = 0

_TERMINAL_HISTORIES = {
    (CHECK, CHECK),
    (BET, CALL),
    (BET, FOLD),
    (CHECK, BET, CALL),
    (CHECK, BET, FOLD),
}


@dataclass(frozen=True)
class KuhnState:
    """State of a match.

    ``cards`` holds the hole cards of the running hand per seat and
    ``history`` its betting actions. ``pot`` contains the antes and bets
    of the running hand.
    """

    cards: Tuple[int, ...] = (HIDDEN, HIDDEN)
    stacks: Tuple[int, ...] = (0, 0)
    pot: int = 0
    history: Tuple[int, ...] = ()
    hand: int = 0
    seat: int = 0
    finished: bool = False


@dataclass(frozen=True)
class Kuhn(GameDef):
    name: str = "kuhn"
    seats: int = 2
    stream_names: Tuple[str, ...] = ("deal",)
    stack: int = 4
    ante: int = 1
    bet: int = 1
    max_hands: int = 8

    def __post_init__(self):
        super().__post_init__()
        if self.seats != 2:
            raise InvalidArgumentError("kuhn is a two seat game")
        if min(self.ante, self.bet, self.max_hands) < 1 or self.stack < self.ante:
            raise InvalidArgumentError(
                "kuhn needs positive ante, bet and max_hands and stack >= ante"
            )

    def initial_state(self, streams):
        return self._deal((self.stack, self.stack), 0, streams)

    def _deal(self, stacks, hand, streams):
        deal = streams["deal"]
        remaining = list(CARDS)
        first = remaining.pop(deal.uniform(3))
        second = remaining.pop(deal.uniform(2))
        state = KuhnState(
            cards=(first, second),
            stacks=(stacks[0] - self.ante, stacks[1] - self.ante),
            pot=2 * self.ante,
            hand=hand,
            seat=hand % 2,
        )
        if min(state.stacks) < self.bet:
            # nobody can bet, the hand goes straight to showdown
            return self._settle(state, self._showdown_winner(state), streams)
        return state

    @staticmethod
    def _showdown_winner(state):
        return 0 if state.cards[0] > state.cards[1] else 1

    def _settle(self, state, winner, streams):
        stacks = _add(state.stacks, winner, state.pot)
        hand = state.hand + 1
        if min(stacks) < self.ante or hand >= self.max_hands:
            return KuhnState(
                cards=state.cards,
                stacks=stacks,
                hand=hand,
                seat=state.seat,
                finished=True,
            )
        return self._deal(stacks, hand, streams)

    def current_seat(self, state):
        return state.seat

    def legal_actions(self, state):
        if state.history and state.history[-1] == BET:
            return [CALL, FOLD]
        return [CHECK, BET]

    def apply_action(self, state, action, streams):
        seat, other = state.seat, 1 - state.seat
        history = state.history + (action,)
        stacks, pot = state.stacks, state.pot
        if action in (BET, CALL):
            stacks, pot = _add(stacks, seat, -self.bet), pot + self.bet
        state = replace(state, history=history, stacks=stacks, pot=pot, seat=other)
        if history not in _TERMINAL_HISTORIES:
            return state
        if action == FOLD:
            return self._settle(state, other, streams)
        return self._settle(state, self._showdown_winner(state), streams)

    def scores(self, state):
        if not state.finished:
            return None
        first, second = state.stacks
        if first == second:
            return (0.5, 0.5)
        return (1.0, 0.0) if first > second else (0.0, 1.0)

    def observe(self, state, seat):
        cards = list(state.cards)
        cards[1 - seat] = HIDDEN
        return replace(state, cards=tuple(cards))

    def redeterminize(self, state, observer, rng):
        own = state.cards[observer]
        cards = list(state.cards)
        cards[1 - observer] = rng.choice([c for c in CARDS if c != own])
        return replace(state, cards=tuple(cards))

    def check_invariants(self, state):
        if sum(state.stacks) + state.pot != 2 * self.stack:
            raise ContractError(f"chips not conserved: {state.stacks} + {state.pot}")
        if state.history and not any(
            t[: len(state.history)] == state.history for t in _TERMINAL_HISTORIES
        ):
            raise ContractError(f"invalid betting history {state.history}")

    def describe_action(self, action):
        return ACTION_NAMES[action]


def _add(stacks, seat, amount):
    stacks = list(stacks)
    stacks[seat] += amount
    return tuple(stacks)


# Information sets of the single hand, keyed by (card, history seen)
FIRST_INFOSETS = [(c, ()) for c in CARDS] + [(c, (CHECK, BET)) for c in CARDS]
SECOND_INFOSETS = [(c, (BET,)) for c in CARDS] + [(c, (CHECK,)) for c in CARDS]


def _choices(history):
    return (CALL, FOLD) if history and history[-1] == BET else (CHECK, BET)


def hand_payoff(cards, first, second):
    """Chips the first actor wins in one hand of pure strategies.

    :param cards: hole cards ``(first actor, second actor)``
    :param first: mapping of first actor information sets to actions
    :param second: mapping of second actor information sets to actions

    >>> always_bet = {(c, h): BET for c, h in FIRST_INFOSETS}
    >>> always_call = {(c, h): CALL for c, h in SECOND_INFOSETS}
    >>> hand_payoff((KING, JACK), always_bet, always_call)
    2
    """
    history: Tuple[int, ...] = ()
    while history not in _TERMINAL_HISTORIES:
        actor = len(history) % 2
        strategy = first if actor == 0 else second
        history += (strategy[(cards[actor], history)],)
    showdown = 1 if cards[0] > cards[1] else -1
    if history == (BET, FOLD):
        return 1
    if history == (CHECK, BET, FOLD):
        return -1
    return showdown if history == (CHECK, CHECK) else 2 * showdown


def _pure_strategies(infosets):
    return [
        dict(zip(infosets, actions))
        for actions in product(*(_choices(h) for _, h in infosets))
    ]


def _deals():
    return [(a, b) for a in CARDS for b in CARDS if a != b]


@dataclass(frozen=True)
class HandSolution:
    """Equilibrium of the single hand.

    ``value`` is the first actor's expected chips per hand, ``exact_value``
    its rational reconstruction. The behaviour strategies map every
    information set to the probability of the aggressive action (bet or
    call).
    """

    value: float
    exact_value: Fraction
    first: Dict[Tuple[int, Tuple[int, ...]], float] = field(default_factory=dict)
    second: Dict[Tuple[int, Tuple[int, ...]], float] = field(default_factory=dict)


def payoff_matrix():
    """Expected first actor payoff of every pair of pure strategies"""
    firsts = _pure_strategies(FIRST_INFOSETS)
    seconds = _pure_strategies(SECOND_INFOSETS)
    deals = _deals()
    matrix = np.zeros((len(firsts), len(seconds)))
    for i, first in enumerate(firsts):
        for j, second in enumerate(seconds):
            matrix[i, j] = sum(hand_payoff(d, first, second) for d in deals) / len(
                deals
            )
    return firsts, seconds, matrix


def _maximin(matrix):
    rows, columns = matrix.shape
    result = linprog(
        c=np.r_[np.zeros(rows), -1.0],
        A_ub=np.c_[-matrix.T, np.ones(columns)],
        b_ub=np.zeros(columns),
        A_eq=np.r_[np.ones(rows), 0.0].reshape(1, -1),
        b_eq=[1.0],
        bounds=[(0, None)] * rows + [(None, None)],
        method="highs",
    )
    if not result.success:
        raise ContractError(f"equilibrium computation failed: {result.message}")
    return np.clip(result.x[:rows], 0.0, None), -result.fun


def _behaviour(strategies, mix, infosets):
    aggressive = {}
    for infoset in infosets:
        card, history = infoset
        reached = [
            (s, w)
            for s, w in zip(strategies, mix)
            if len(history) < 2 or s[(card, ())] == CHECK
        ]
        total = sum(w for _, w in reached)
        hits = sum(w for s, w in reached if s[infoset] in (BET, CALL))
        aggressive[infoset] = hits / total if total > 0 else 0.0
    return aggressive


def solve_hand():
    """Solve the single hand by linear programming over pure strategies.

    >>> solve_hand().exact_value
    Fraction(-1, 18)
    """
    firsts, seconds, matrix = payoff_matrix()
    first_mix, value = _maximin(matrix)
    second_mix, _ = _maximin(-matrix.T)
    return HandSolution(
        value=float(value),
        exact_value=Fraction(float(value)).limit_denominator(1000),
        first=_behaviour(firsts, first_mix, FIRST_INFOSETS),
        second=_behaviour(seconds, second_mix, SECOND_INFOSETS),
    )


def _sign(card, other):
    return 1 if card > other else -1


def best_response(opponent: Dict, seat: int) -> Tuple[Dict, float]:
    """Best pure response against a behaviour strategy of the opponent.

    The response is computed at every information set, reached or not,
    ties are broken toward call and check.

    :param opponent: behaviour strategy of the other actor, see :class:`HandSolution`
    :param seat: ``0`` to respond as first actor, ``1`` as second actor
    :return: the response strategy and its expected chips per hand
    """
    response: Dict = {}
    total = 0.0
    for card in CARDS:
        others = [c for c in CARDS if c != card]
        if seat == 1:
            call = sum(opponent[(o, ())] * 2 * _sign(card, o) for o in others)
            fold = sum(-opponent[(o, ())] for o in others)
            response[(card, (BET,))] = CALL if call >= fold else FOLD
            check = sum((1 - opponent[(o, ())]) * _sign(card, o) for o in others)
            bet = sum(
                (1 - opponent[(o, ())])
                * (
                    opponent[(o, (CHECK, BET))] * 2 * _sign(card, o)
                    + (1 - opponent[(o, (CHECK, BET))])
                )
                for o in others
            )
            response[(card, (CHECK,))] = BET if bet > check else CHECK
            total += (max(call, fold) + max(check, bet)) / 2
        else:
            call = sum(opponent[(o, (CHECK,))] * 2 * _sign(card, o) for o in others)
            fold = sum(-opponent[(o, (CHECK,))] for o in others)
            response[(card, (CHECK, BET))] = CALL if call >= fold else FOLD
            check = (
                sum((1 - opponent[(o, (CHECK,))]) * _sign(card, o) for o in others)
                + max(call, fold)
            )
            bet = sum(
                opponent[(o, (BET,))] * 2 * _sign(card, o) + (1 - opponent[(o, (BET,))])
                for o in others
            )
            response[(card, ())] = BET if bet > check else CHECK
            total += max(check, bet) / 2
    value = total / len(CARDS)
    return response, value


def strategy_value(first: Dict, second: Dict) -> float:
    """Expected first actor chips when both play pure strategies"""
    deals = _deals()
    return sum(hand_payoff(d, first, second) for d in deals) / len(deals)
