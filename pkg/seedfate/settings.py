"""Layered experiment settings and their resolution into an ExperimentConfig"""

import argparse
from dataclasses import (
    asdict,
    dataclass,
    field,
)
from pathlib import Path
from typing import (
    Any,
    Mapping,
    Optional,
    Tuple,
)

from seedfate.agents import (
    DEFAULT_EXPLORATION,
    DEFAULT_ROLLOUT_CAP,
    ISMCTS,
    KINDS,
    RANDOM,
)
from seedfate.engine import SEED_LIMIT
from seedfate.errors import (
    ConfigurationError,
    SeedfateError,
)
from seedfate.games import build_game
from seedfate.stats import (
    CATALOG,
    parse_mixture,
)

MODES = (
    "distribution",
    "skill-sweep",
    "mirror",
    "disentangle",
    "nonmonotonic",
    "verify-variance",
)
PRESETS = {"desk": (50, 500), "paper": (200, 1000)}
DEFAULT_LADDER = (0, 16, 64, 256, 1024)
DEFAULT_OUT = Path("seedfate-report")


@dataclass
class Settings:
    config: str = None
    game: str = None
    mode: str = None
    n_seeds: int = None
    n_games: int = None
    budget: int = None
    budgets: tuple = None
    agent: str = None
    exploration: float = None
    rollout_cap: int = None
    fix_stream: tuple = None
    root_seed: int = None
    workers: int = None
    out: Path = None
    preset: str = None
    n_boot: int = None
    confidence: float = None
    trim: float = None
    mixture: str = None
    n_draws: int = None
    max_rounds: int = None
    dump_traces: bool = None
    game_options: dict = field(default_factory=dict)
    quiet: bool = None
    verbose: bool = None
    debug: bool = None
    color: str = "auto"


def settings_from(obj):
    supported_types = (
        argparse.Namespace,
        dict,
    )
    _class = type(obj)
    if not issubclass(_class, supported_types):
        raise TypeError(f"Can not construct settings from type: {type(obj).__name__}.")

    def from_namespace(ns):
        return from_dict(vars(ns))

    def from_dict(d):
        d = {k: v for k, v in d.items() if k != "game_options" or v is not None}
        return Settings(**d)

    dispatcher = {
        f"{argparse.Namespace.__name__}": from_namespace,
        f"{dict.__name__}": from_dict,
    }

    return dispatcher[_class.__name__](obj)


def merge_settings(lhs, rhs):
    """Overlay rhs onto lhs, values of rhs which are not None win"""

    def items(d):
        d = vars(d)
        excludes = ["game_options"]
        return ((k, v) for k, v in d.items() if k not in excludes)

    lhs_items = dict(items(lhs))
    rhs_items = dict(items(rhs))

    for name, value in rhs_items.items():
        value = value if value is not None else lhs_items.get(name, None)
        setattr(lhs, name, value)
    lhs.game_options = {**lhs.game_options, **rhs.game_options}
    return lhs


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully resolved and validated experiment"""

    mode: str
    root_seed: int
    game: Optional[str] = None
    n_seeds: int = 0
    n_games: int = 0
    budget: int = 0
    budgets: Tuple[int, ...] = ()
    agent: str = RANDOM
    exploration: float = DEFAULT_EXPLORATION
    rollout_cap: int = DEFAULT_ROLLOUT_CAP
    fix_stream: Tuple[str, ...] = ()
    workers: int = 1
    out: Path = DEFAULT_OUT
    n_boot: int = 1000
    confidence: float = 0.99
    trim: float = 0.05
    mixtures: Tuple[str, ...] = ()
    n_draws: int = 100_000
    max_rounds: Optional[int] = None
    dump_traces: bool = False
    game_options: Mapping[str, Any] = field(default_factory=dict)

    @property
    def options(self):
        """Game constants including the decision cap"""
        options = dict(self.game_options)
        if self.max_rounds is not None:
            options["max_rounds"] = self.max_rounds
        return options

    def to_dict(self):
        config = asdict(self)
        config["out"] = str(self.out)
        config["budgets"] = list(self.budgets)
        config["fix_stream"] = list(self.fix_stream)
        config["mixtures"] = list(self.mixtures)
        config["game_options"] = dict(self.game_options)
        return config


def _positive(name, value, minimum=1):
    if value < minimum:
        raise ConfigurationError(name, f"must be at least {minimum}, got {value}")
    return value


def _open_unit(name, value):
    if not 0.0 < value < 1.0:
        raise ConfigurationError(name, f"must lie in (0, 1), got {value}")
    return value


def _pick(value, default):
    return default if value is None else value


def resolve(settings: Settings) -> ExperimentConfig:
    """Apply presets and defaults to settings and validate the result.

    :raises ConfigurationError: naming the offending field
    """
    mode = _pick(settings.mode, "distribution")
    if mode not in MODES:
        raise ConfigurationError(
            "mode", f"unknown mode {mode!r}; valid modes: {', '.join(MODES)}"
        )
    if settings.root_seed is None:
        raise ConfigurationError("root_seed", "a root seed is required")
    if not 0 <= settings.root_seed < SEED_LIMIT:
        raise ConfigurationError("root_seed", "must be a 64-bit unsigned integer")
    common = {
        "mode": mode,
        "root_seed": settings.root_seed,
        "out": Path(_pick(settings.out, DEFAULT_OUT)),
        "confidence": _open_unit("confidence", _pick(settings.confidence, 0.99)),
    }

    if mode == "verify-variance":
        mixtures = (settings.mixture,) if settings.mixture else CATALOG
        for mixture in mixtures:
            parse_mixture(mixture)
        return ExperimentConfig(
            mixtures=tuple(mixtures),
            n_draws=_positive("n_draws", _pick(settings.n_draws, 100_000), 2),
            **common,
        )

    if settings.game is None:
        raise ConfigurationError("game", f"required for mode {mode}")
    options = dict(settings.game_options)
    if settings.max_rounds is not None:
        options["max_rounds"] = _positive("max_rounds", settings.max_rounds)
    try:
        game = build_game(settings.game, **options)
    except SeedfateError as ex:
        if isinstance(ex, ConfigurationError):
            raise
        raise ConfigurationError("game_options", str(ex)) from ex

    if settings.preset is not None and settings.preset not in PRESETS:
        raise ConfigurationError(
            "preset",
            f"unknown preset {settings.preset!r}; valid presets: {', '.join(PRESETS)}",
        )
    seeds, games = PRESETS[_pick(settings.preset, "paper")]
    n_seeds = _positive("n_seeds", _pick(settings.n_seeds, seeds), 2)
    n_games = _positive("n_games", _pick(settings.n_games, games))
    if mode == "mirror" and n_games % 2:
        raise ConfigurationError("n_games", "mirror mode needs an even number of games")

    budget = _positive("budget", _pick(settings.budget, 0), 0)
    agent = _pick(settings.agent, ISMCTS if budget else RANDOM)
    if agent not in KINDS:
        raise ConfigurationError(
            "agent", f"unknown agent {agent!r}; valid agents: {', '.join(KINDS)}"
        )
    if agent == RANDOM and budget:
        raise ConfigurationError("budget", "a random agent has budget 0")
    if agent == ISMCTS and not budget:
        raise ConfigurationError("budget", "an ismcts agent needs a positive budget")

    budgets: Tuple[int, ...] = ()
    if mode in ("skill-sweep", "nonmonotonic"):
        budgets = tuple(_pick(settings.budgets, DEFAULT_LADDER))
        if any(b < 0 for b in budgets) or any(
            low >= high for low, high in zip(budgets, budgets[1:])
        ):
            raise ConfigurationError(
                "budgets", f"must be non-negative and strictly increasing: {budgets}"
            )
        minimum = 3 if mode == "nonmonotonic" else 1
        if len(budgets) < minimum:
            raise ConfigurationError(
                "budgets", f"mode {mode} needs at least {minimum} budgets"
            )

    fix_stream: Tuple[str, ...] = ()
    if mode == "disentangle":
        fix_stream = tuple(_pick(settings.fix_stream, ()))
        unknown = [s for s in fix_stream if s not in game.stream_names]
        if not fix_stream or unknown:
            raise ConfigurationError(
                "fix_stream",
                f"unknown stream(s) {', '.join(unknown) or '(none given)'} "
                f"for game {game.name!r}; "
                f"valid streams: {', '.join(game.stream_names) or 'none'}",
            )

    exploration = _pick(settings.exploration, DEFAULT_EXPLORATION)
    if exploration < 0:
        raise ConfigurationError("exploration", "must not be negative")
    trim = _pick(settings.trim, 0.05)
    if not 0.0 <= trim < 1.0:
        raise ConfigurationError("trim", f"must lie in [0, 1), got {trim}")

    return ExperimentConfig(
        game=game.name,
        n_seeds=n_seeds,
        n_games=n_games,
        budget=budget,
        budgets=budgets,
        agent=agent,
        exploration=exploration,
        rollout_cap=_positive("rollout_cap", _pick(settings.rollout_cap, 200)),
        fix_stream=fix_stream,
        workers=_positive("workers", _pick(settings.workers, 1)),
        n_boot=_positive("n_boot", _pick(settings.n_boot, 1000), 0),
        trim=trim,
        max_rounds=settings.max_rounds,
        dump_traces=bool(settings.dump_traces),
        game_options=dict(settings.game_options),
        **common,
    )
