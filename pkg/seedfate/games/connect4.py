"""Connect Four, the deterministic control game.

Actions are column indices ``0..6``. The board is stored column-wise,
every column is the bottom-up tuple of the seats which dropped a piece
into it, so pieces always obey gravity.
"""

from dataclasses import dataclass
from typing import (
    Optional,
    Tuple,
)

from seedfate.engine import GameDef
from seedfate.errors import ContractError

COLUMNS = 7
ROWS = 6
_DIRECTIONS = ((1, 0), (0, 1), (1, 1), (1, -1))


@dataclass(frozen=True)
class Connect4State:
    columns: Tuple[Tuple[int, ...], ...] = ((),) * COLUMNS
    seat: int = 0
    winner: Optional[int] = None
    pieces: int = 0

    def piece(self, column, row):
        """Seat owning the cell or None if the cell is empty"""
        stack = self.columns[column]
        return stack[row] if row < len(stack) else None

    def grid(self):
        """Rows from top to bottom, ``.`` for empty cells"""
        return [
            "".join(
                "." if self.piece(c, r) is None else str(self.piece(c, r))
                for c in range(COLUMNS)
            )
            for r in reversed(range(ROWS))
        ]


def _connects(state, column, row, seat):
    for dx, dy in _DIRECTIONS:
        run = 1
        for sign in (1, -1):
            x, y = column + sign * dx, row + sign * dy
            while 0 <= x < COLUMNS and 0 <= y < ROWS and state.piece(x, y) == seat:
                run += 1
                x, y = x + sign * dx, y + sign * dy
        if run >= 4:
            return True
    return False


@dataclass(frozen=True)
class Connect4(GameDef):
    name: str = "connect4"
    seats: int = 2
    stream_names: Tuple[str, ...] = ()

    def initial_state(self, streams):
        return Connect4State()

    def current_seat(self, state):
        return state.seat

    def legal_actions(self, state):
        return [c for c in range(COLUMNS) if len(state.columns[c]) < ROWS]

    def apply_action(self, state, action, streams):
        row = len(state.columns[action])
        columns = list(state.columns)
        columns[action] = columns[action] + (state.seat,)
        successor = Connect4State(
            columns=tuple(columns),
            seat=1 - state.seat,
            pieces=state.pieces + 1,
        )
        if _connects(successor, action, row, state.seat):
            return Connect4State(
                columns=successor.columns,
                seat=successor.seat,
                winner=state.seat,
                pieces=successor.pieces,
            )
        return successor

    def scores(self, state):
        if state.winner is not None:
            return tuple(1.0 if s == state.winner else 0.0 for s in range(self.seats))
        if state.pieces == COLUMNS * ROWS:
            return (0.5, 0.5)
        return None

    def check_invariants(self, state):
        counts = [sum(col.count(s) for col in state.columns) for s in (0, 1)]
        if counts[0] - counts[1] not in (0, 1):
            raise ContractError(f"unbalanced piece counts {counts}")
        if any(len(col) > ROWS for col in state.columns):
            raise ContractError("column overflow")

    def describe_action(self, action):
        return f"drop in column {action}"


def from_rows(rows, seat=None):
    """Build a state from a top-down picture using ``0``, ``1`` and ``.``.

    Intended for tests and documentation examples.

    >>> state = from_rows(["0111...", "0000..."])
    >>> state.columns[0], state.seat
    ((0, 0), 0)
    """
    columns = [[] for _ in range(COLUMNS)]
    for line in reversed(rows):
        for column, cell in enumerate(line):
            if cell != ".":
                columns[column].append(int(cell))
    pieces = sum(len(c) for c in columns)
    if seat is None:
        seat = pieces % 2
    state = Connect4State(
        columns=tuple(tuple(c) for c in columns), seat=seat, pieces=pieces
    )
    for column, stack in enumerate(state.columns):
        for row, owner in enumerate(stack):
            if _connects(state, column, row, owner):
                return Connect4State(state.columns, seat, owner, pieces)
    return state
