"""The built-in games and the rule level entry points shared by all of them"""

from seedfate.engine import GameDef
from seedfate.errors import (
    ConfigurationError,
    ContractError,
    ProtocolError,
)
from seedfate.games.cantstop import CantStop
from seedfate.games.connect4 import Connect4
from seedfate.games.kuhn import Kuhn
from seedfate.games.loveletter import LoveLetter

__all__ = [
    "GAMES",
    "apply_action",
    "build_game",
    "legal_actions",
    "terminal_outcome",
]

GAMES = {
    "connect4": Connect4,
    "cantstop": CantStop,
    "loveletter": LoveLetter,
    "kuhn": Kuhn,
}


def build_game(game_name, /, **options) -> GameDef:
    """Create a configured game by name.

    :param game_name: one of ``connect4``, ``cantstop``, ``loveletter``, ``kuhn``
    :param options: game constants to override, e.g. ``max_hands`` for kuhn

    >>> build_game("loveletter").stream_names
    ('burn', 'deck')
    >>> build_game("poker")
    Traceback (most recent call last):
    ...
    seedfate.errors.ConfigurationError: game: unknown game 'poker'; valid games: cantstop, connect4, kuhn, loveletter
    """
    try:
        factory = GAMES[game_name]
    except KeyError as ex:
        valid = ", ".join(sorted(GAMES))
        raise ConfigurationError(
            "game", f"unknown game {game_name!r}; valid games: {valid}"
        ) from ex
    protected = {"name", "stream_names"}.intersection(options)
    if protected:
        raise ConfigurationError(
            "game_options", f"{', '.join(sorted(protected))} can not be overridden"
        )
    try:
        return factory(**options)
    except TypeError as ex:
        raise ConfigurationError("game_options", f"{game_name}: {ex}") from ex


def legal_actions(game, state):
    """Canonically ordered legal actions of a running game"""
    if game.is_terminal(state):
        raise ContractError(f"{game.name}: no legal actions in a terminal state")
    return game.legal_actions(state)


def apply_action(game, state, action, streams):
    """Successor of state, rejecting actions which are not legal"""
    if action not in legal_actions(game, state):
        raise ProtocolError(game.current_seat(state), None, action)
    return game.apply_action(state, action, streams)


def terminal_outcome(game, state):
    """The :class:`~seedfate.engine.GameOutcome` of state or None while running"""
    return game.terminal_outcome(state)
