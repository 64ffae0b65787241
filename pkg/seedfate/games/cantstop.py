"""Can't Stop, a push-your-luck dice game with unknowable ongoing chance.

Action encoding:

* ``0`` roll the four dice again
* ``1`` stop, making the temporary progress permanent
* ``100 + 13 * a + b`` advance the marker of column ``a`` and, if ``b``
  is not zero, of column ``b`` (``a <= b``); ``b == a`` advances the
  same column twice

All dice come from the chance stream ``dice``. A new turn starts with an
automatic roll, a turn whose opening roll allows no move passes on.
"""

from dataclasses import (
    dataclass,
    replace,
)
from typing import (
    Tuple,
)

from seedfate.engine import GameDef
from seedfate.errors import ContractError

ROLL = 0
STOP = 1
HEIGHTS = {2: 3, 3: 5, 4: 7, 5: 9, 6: 11, 7: 13, 8: 11, 9: 9, 10: 7, 11: 5, 12: 3}
MAX_MARKERS = 3
COLUMNS_TO_WIN = 3
_NO_OWNER = -1
_EMPTY_PROGRESS = (0,) * 13
_UNCLAIMED = (_NO_OWNER,) * 13


def advance_code(first, second=0):
    """Action code of advancing ``first`` and optionally ``second``.

    >>> advance_code(3, 7), advance_code(5, 5), advance_code(9)
    (146, 170, 217)
    """
    if second and second < first:
        first, second = second, first
    return 100 + 13 * first + second


def decode(action):
    """Columns advanced by an action code, ``()`` for roll and stop.

    >>> decode(146), decode(217), decode(ROLL)
    ((3, 7), (9,), ())
    """
    if action < 100:
        return ()
    first, second = divmod(action - 100, 13)
    return (first, second) if second else (first,)


def pairings(dice):
    """The three ways of splitting four dice into two pairs.

    >>> pairings((1, 2, 3, 4))
    [(3, 7), (4, 6), (5, 5)]
    """
    a, b, c, d = dice
    return [(a + b, c + d), (a + c, b + d), (a + d, b + c)]


@dataclass(frozen=True)
class CantStopState:
    progress: Tuple[Tuple[int, ...], ...] = (_EMPTY_PROGRESS, _EMPTY_PROGRESS)
    claimed: Tuple[int, ...] = _UNCLAIMED
    markers: Tuple[Tuple[int, int], ...] = ()
    dice: Tuple[int, ...] = ()
    seat: int = 0
    turns: int = 0

    def position(self, column):
        """Height of the current seat in column, temporary markers included"""
        for marked, height in self.markers:
            if marked == column:
                return height
        return self.progress[self.seat][column]


def _try_advance(state, markers, column):
    if state.claimed[column] != _NO_OWNER:
        return False
    if column not in markers and len(markers) >= MAX_MARKERS:
        return False
    height = markers.get(column, state.progress[state.seat][column])
    if height >= HEIGHTS[column]:
        return False
    markers[column] = height + 1
    return True


def options(state):
    """Legal advance codes for the dice of state, empty on a bust"""
    codes = set()
    markers = dict(state.markers)
    for first, second in pairings(state.dice):
        both = dict(markers)
        if _try_advance(state, both, first) and _try_advance(state, both, second):
            codes.add(advance_code(first, second))
            continue
        for column in (first, second):
            if _try_advance(state, dict(markers), column):
                codes.add(advance_code(column))
    return sorted(codes)


@dataclass(frozen=True)
class CantStop(GameDef):
    name: str = "cantstop"
    seats: int = 2
    stream_names: Tuple[str, ...] = ("dice",)

    def _roll(self, streams):
        dice = streams["dice"]
        return tuple(dice.uniform(6) + 1 for _ in range(4))

    def _begin_turn(self, progress, claimed, seat, turns, streams):
        while True:
            state = CantStopState(
                progress=progress,
                claimed=claimed,
                dice=self._roll(streams),
                seat=seat,
                turns=turns,
            )
            if options(state):
                return state
            seat, turns = (seat + 1) % self.seats, turns + 1

    def initial_state(self, streams):
        return self._begin_turn(
            (_EMPTY_PROGRESS,) * self.seats, _UNCLAIMED, 0, 0, streams
        )

    def current_seat(self, state):
        return state.seat

    def legal_actions(self, state):
        if state.dice:
            return options(state)
        return [ROLL, STOP]

    def apply_action(self, state, action, streams):
        if state.dice:
            markers = dict(state.markers)
            for column in decode(action):
                markers[column] = markers.get(
                    column, state.progress[state.seat][column]
                ) + 1
            return replace(state, markers=tuple(sorted(markers.items())), dice=())
        if action == ROLL:
            rolled = replace(state, dice=self._roll(streams))
            if options(rolled):
                return rolled
            return self._pass_turn(state, state.progress, state.claimed, streams)
        return self._stop(state, streams)

    def _stop(self, state, streams):
        own = list(state.progress[state.seat])
        claimed = list(state.claimed)
        for column, height in state.markers:
            own[column] = height
            if height == HEIGHTS[column]:
                claimed[column] = state.seat
        progress = list(state.progress)
        progress[state.seat] = tuple(own)
        if claimed.count(state.seat) >= COLUMNS_TO_WIN:
            return CantStopState(
                progress=tuple(progress),
                claimed=tuple(claimed),
                seat=state.seat,
                turns=state.turns,
            )
        return self._pass_turn(state, tuple(progress), tuple(claimed), streams)

    def _pass_turn(self, state, progress, claimed, streams):
        return self._begin_turn(
            progress, claimed, (state.seat + 1) % self.seats, state.turns + 1, streams
        )

    def scores(self, state):
        for seat in range(self.seats):
            if state.claimed.count(seat) >= COLUMNS_TO_WIN:
                return tuple(1.0 if s == seat else 0.0 for s in range(self.seats))
        return None

    def check_invariants(self, state):
        if len(state.markers) > MAX_MARKERS:
            raise ContractError(f"{len(state.markers)} temporary markers")
        for column, height in state.markers:
            if state.claimed[column] != _NO_OWNER:
                raise ContractError(f"marker in claimed column {column}")
            if not state.progress[state.seat][column] < height <= HEIGHTS[column]:
                raise ContractError(f"marker height {height} in column {column}")
        for seat_progress in state.progress:
            for column, height in HEIGHTS.items():
                if seat_progress[column] > height:
                    raise ContractError(f"progress beyond the top of column {column}")

    def describe_action(self, action):
        if action == ROLL:
            return "roll"
        if action == STOP:
            return "stop"
        return "advance " + "+".join(str(c) for c in decode(action))
