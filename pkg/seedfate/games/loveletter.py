"""Love Letter for two players, the baked-in shuffle game.

Cards are identified by their value:

=====  ========  =====
value  name      count
=====  ========  =====
1      Guard     5
2      Priest    2
3      Baron     2
4      Handmaid  2
5      Prince    2
6      King      1
7      Countess  1
8      Princess  1
=====  ========  =====

An action is ``10 * card + parameter``. The Guard's parameter is the
guessed value (``12`` .. ``18``), ``10`` plays it without effect when the
opponent is protected. The Prince targets the opponent with ``50`` and
its own holder with ``51``. Every other card has parameter ``0``.

The burn card is chosen by the chance stream ``burn``, the remaining 15
cards are shuffled by the stream ``deck``. After the setup no chance is
consumed, all later draws come from the shuffled deck.
"""

from collections import Counter
from dataclasses import (
    dataclass,
    replace,
)
from typing import (
    Tuple,
)

from seedfate.engine import GameDef
from seedfate.errors import (
    ContractError,
    InvalidArgumentError,
)

GUARD, PRIEST, BARON, HANDMAID, PRINCE, KING, COUNTESS, PRINCESS = range(1, 9)
NAMES = {
    GUARD: "Guard",
    PRIEST: "Priest",
    BARON: "Baron",
    HANDMAID: "Handmaid",
    PRINCE: "Prince",
    KING: "King",
    COUNTESS: "Countess",
    PRINCESS: "Princess",
}
FULL_DECK = (1, 1, 1, 1, 1, 2, 2, 3, 3, 4, 4, 5, 5, 6, 7, 8)
HIDDEN = 0
PRINCE_OPPONENT = 50
PRINCE_SELF = 51


@dataclass(frozen=True)
class LoveLetterState:
    """Complete round state.

    ``deck`` is the draw pile, its first entry is drawn next. ``known[s]``
    is the card seat ``s`` knows its opponent to hold or ``0``.
    """

    deck: Tuple[int, ...] = ()
    burn: int = HIDDEN
    hands: Tuple[Tuple[int, ...], ...] = ((), ())
    discards: Tuple[Tuple[int, ...], ...] = ((), ())
    protected: Tuple[bool, ...] = (False, False)
    eliminated: Tuple[bool, ...] = (False, False)
    known: Tuple[int, ...] = (HIDDEN, HIDDEN)
    seat: int = 0
    burn_used: bool = False
    finished: bool = False


def _set(values, index, value):
    values = list(values)
    values[index] = value
    return tuple(values)


def _without(hand, card):
    hand = list(hand)
    hand.remove(card)
    return tuple(hand)


def _masked(hand, known):
    """An opponent hand as seen by a seat which knows at most one card"""
    return (known,) + (HIDDEN,) * (len(hand) - 1) if hand else ()


@dataclass(frozen=True)
class LoveLetter(GameDef):
    name: str = "loveletter"
    seats: int = 2
    stream_names: Tuple[str, ...] = ("burn", "deck")

    def __post_init__(self):
        super().__post_init__()
        if self.seats != 2:
            raise InvalidArgumentError("loveletter is implemented for two seats")

    def initial_state(self, streams):
        cards = list(FULL_DECK)
        burn = cards.pop(streams["burn"].uniform(len(cards)))
        deck = streams["deck"].shuffle(cards)
        hands = ((deck[0], deck[2]), (deck[1],))
        return LoveLetterState(
            deck=tuple(deck[3:]),
            burn=burn,
            hands=tuple(tuple(sorted(h)) for h in hands),
        )

    def current_seat(self, state):
        return state.seat

    def legal_actions(self, state):
        hand = state.hands[state.seat]
        if COUNTESS in hand and (KING in hand or PRINCE in hand):
            return [COUNTESS * 10]
        shielded = state.protected[1 - state.seat]
        actions = set()
        for card in hand:
            if card == GUARD:
                if shielded:
                    actions.add(GUARD * 10)
                else:
                    actions.update(GUARD * 10 + guess for guess in range(2, 9))
            elif card == PRINCE:
                actions.add(PRINCE_SELF)
                if not shielded:
                    actions.add(PRINCE_OPPONENT)
            else:
                actions.add(card * 10)
        return sorted(actions)

    def apply_action(self, state, action, streams):
        seat, other = state.seat, 1 - state.seat
        card, parameter = divmod(action, 10)
        hands = _set(state.hands, seat, _without(state.hands[seat], card))
        state = replace(
            state,
            hands=hands,
            discards=_set(state.discards, seat, state.discards[seat] + (card,)),
        )
        if state.known[other] == card:
            state = replace(state, known=_set(state.known, other, HIDDEN))
        shielded = state.protected[other]
        mine = state.hands[seat][0]

        if card == GUARD and parameter and not shielded:
            if state.hands[other][0] == parameter:
                state = self._eliminate(state, other)
        elif card == PRIEST and not shielded:
            state = replace(state, known=_set(state.known, seat, state.hands[other][0]))
        elif card == BARON and not shielded:
            theirs = state.hands[other][0]
            known = (theirs, mine) if seat == 0 else (mine, theirs)
            state = replace(state, known=known)
            if mine > theirs:
                state = self._eliminate(state, other)
            elif theirs > mine:
                state = self._eliminate(state, seat)
        elif card == HANDMAID:
            state = replace(state, protected=_set(state.protected, seat, True))
        elif card == PRINCE:
            target = seat if action == PRINCE_SELF else other
            state = self._discard_and_redraw(state, target)
        elif card == KING and not shielded:
            theirs = state.hands[other][0]
            swapped = _set(_set(state.hands, seat, (theirs,)), other, (mine,))
            known = (mine, theirs) if seat == 0 else (theirs, mine)
            state = replace(state, hands=swapped, known=known)
        elif card == PRINCESS:
            state = self._eliminate(state, seat)
        return self._end_turn(state)

    def _eliminate(self, state, seat):
        return replace(
            state,
            hands=_set(state.hands, seat, ()),
            discards=_set(
                state.discards, seat, state.discards[seat] + state.hands[seat]
            ),
            eliminated=_set(state.eliminated, seat, True),
        )

    def _discard_and_redraw(self, state, target):
        (card,) = state.hands[target]
        discards = _set(state.discards, target, state.discards[target] + (card,))
        known = _set(state.known, 1 - target, HIDDEN)
        state = replace(state, discards=discards, known=known)
        if card == PRINCESS:
            return replace(
                state,
                hands=_set(state.hands, target, ()),
                eliminated=_set(state.eliminated, target, True),
            )
        if state.deck:
            drawn, deck, burn, used = state.deck[0], state.deck[1:], state.burn, False
        else:
            drawn, deck, burn, used = state.burn, (), HIDDEN, True
        return replace(
            state,
            hands=_set(state.hands, target, (drawn,)),
            deck=deck,
            burn=burn,
            burn_used=state.burn_used or used,
        )

    def _end_turn(self, state):
        if any(state.eliminated) or not state.deck:
            return replace(state, finished=True)
        following = 1 - state.seat
        hand = tuple(sorted(state.hands[following] + (state.deck[0],)))
        return replace(
            state,
            deck=state.deck[1:],
            hands=_set(state.hands, following, hand),
            protected=_set(state.protected, following, False),
            seat=following,
        )

    def scores(self, state):
        if not state.finished:
            return None
        if state.eliminated[0] != state.eliminated[1]:
            return (0.0, 1.0) if state.eliminated[0] else (1.0, 0.0)
        ranking = [(state.hands[s][0], sum(state.discards[s])) for s in (0, 1)]
        if ranking[0] == ranking[1]:
            return (0.5, 0.5)
        return (1.0, 0.0) if ranking[0] > ranking[1] else (0.0, 1.0)

    def observe(self, state, seat):
        other = 1 - seat
        opponent = _masked(state.hands[other], state.known[seat])
        return replace(
            state,
            deck=(HIDDEN,) * len(state.deck),
            burn=HIDDEN,
            hands=_set(state.hands, other, opponent),
        )

    def redeterminize(self, state, observer, rng):
        other = 1 - observer
        unseen = Counter(FULL_DECK)
        unseen.subtract(state.hands[observer])
        for pile in state.discards:
            unseen.subtract(pile)
        opponent_known = state.known[observer] != HIDDEN and state.hands[other]
        if opponent_known:
            unseen.subtract(state.hands[other])
        pool = rng.shuffle(sorted(unseen.elements()))
        hands = state.hands
        if state.hands[other] and not opponent_known:
            hands = _set(hands, other, (pool.pop(),))
        burn = HIDDEN if state.burn_used else pool.pop()
        return replace(state, hands=hands, burn=burn, deck=tuple(pool))

    def check_invariants(self, state):
        cards = list(state.deck)
        if not state.burn_used:
            cards.append(state.burn)
        for seat in (0, 1):
            cards.extend(state.hands[seat])
            cards.extend(state.discards[seat])
        if sorted(cards) != list(FULL_DECK):
            raise ContractError(f"card multiset changed: {sorted(cards)}")
        if not state.finished and state.eliminated[state.seat]:
            raise ContractError(f"eliminated seat {state.seat} is on turn")

    def describe_action(self, action):
        card, parameter = divmod(action, 10)
        if action == PRINCE_SELF:
            return "Prince on self"
        if card == GUARD and parameter:
            return f"Guard guessing {NAMES[parameter]}"
        return NAMES[card]
