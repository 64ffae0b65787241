"""Exceptions raised by seedfate"""

__all__ = [
    "SeedfateError",
    "InvalidArgumentError",
    "ConfigurationError",
    "ContractError",
    "ProtocolError",
    "PlayoutError",
]


class SeedfateError(Exception):
    """Base class of all seedfate errors"""


class InvalidArgumentError(SeedfateError, ValueError):
    """An argument is outside of its documented domain"""


class ConfigurationError(SeedfateError):
    """A configuration value is missing, unknown or invalid.

    >>> str(ConfigurationError("n_seeds", "must be at least 2"))
    'n_seeds: must be at least 2'
    """

    def __init__(self, field, message):
        super().__init__(field, message)
        self.field = field
        self.message = message

    def __str__(self):
        return f"{self.field}: {self.message}"


class ContractError(SeedfateError):
    """A precondition of an operation was violated by the caller"""


class ProtocolError(SeedfateError):
    """An agent chose an action which is not legal in the current state"""

    def __init__(self, seat, turn, action):
        super().__init__(seat, turn, action)
        self.seat = seat
        self.turn = turn
        self.action = action

    def __str__(self):
        where = "" if self.turn is None else f" on turn {self.turn}"
        return f"seat {self.seat} chose illegal action {self.action!r}{where}"


class PlayoutError(SeedfateError):
    """A playout inside a seed block failed.

    Carries everything needed to replay the failing game.
    """

    def __init__(self, game_seed, game_index, reason):
        super().__init__(game_seed, game_index, reason)
        self.game_seed = game_seed
        self.game_index = game_index
        self.reason = reason

    def __str__(self):
        return (
            f"game_seed={self.game_seed} game_index={self.game_index}: {self.reason}"
        )
