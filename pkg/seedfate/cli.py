"""The command line interface implementation"""

import argparse
import json
import logging
import sys
from collections import defaultdict
from functools import partial
from pathlib import Path

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from seedfate.agents import AgentConfig
from seedfate.engine import derive_seed
from seedfate.errors import (
    ConfigurationError,
    SeedfateError,
)
from seedfate.games import build_game
from seedfate.report import (
    write_histogram,
    write_report,
    write_seeds,
    write_sweep,
    write_traces,
)
from seedfate.runner import (
    BOOTSTRAP,
    MIXTURE,
    run_disentangled,
    run_distribution,
    run_mirrored,
    run_skill_sweep,
    trace_block,
)
from seedfate.settings import (
    MODES,
    PRESETS,
    merge_settings,
    resolve,
    settings_from,
)
from seedfate.stats import (
    METRICS,
    metrics,
    nonmonotonic_seeds,
    variance_reduction,
    verify_variance,
)

VERSION = "0.1.0"

_logger = logging.getLogger(__name__)

# destinations which are only accepted on the command line
_CLI_ONLY = ("config", "quiet", "verbose", "debug", "color")


class ExitCode:
    """Possible exit codes of the seedfate CLI"""

    SUCCESS = 0
    CHECK_FAILED = 1
    CONFIG_ERROR = 2
    RUNTIME_ERROR = 3


def main(argv=None):
    """Main entry point.

    :param argv: Script arguments (excluding script name)
    :type argv: iterable of strings
    :return: Exit code (non-zero on failure)
    :rtype: int
    """
    return _Cli().main(argv)


def _ladder(text):
    """Parse a comma separated budget ladder.

    >>> _ladder("0,16,64")
    (0, 16, 64)
    """
    try:
        return tuple(int(budget) for budget in text.split(","))
    except ValueError as ex:
        raise argparse.ArgumentTypeError(f"invalid budget ladder: {text!r}") from ex


def _streams(text):
    """Parse a comma separated list of stream names.

    >>> _streams("burn,deck")
    ('burn', 'deck')
    """
    return tuple(name.strip() for name in text.split(",") if name.strip())


def _game_option(text):
    """Parse ``key=value``, the value is read as JSON if possible.

    >>> _game_option("stack=6"), _game_option("name=x")
    (('stack', 6), ('name', 'x'))
    """
    key, separator, value = text.partition("=")
    if not separator or not key:
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    try:
        return key, json.loads(value)
    except ValueError:
        return key, value


def _is(*types):
    def check(value):
        return isinstance(value, types) and not (
            isinstance(value, bool) and bool not in types
        )

    return check


def _sequence_of(_type, converter):
    def convert(value):
        if isinstance(value, str):
            return converter(value)
        if isinstance(value, list) and all(_is(_type)(v) for v in value):
            return tuple(value)
        raise ValueError(value)

    return convert


def _checked(check, converter=lambda v: v):
    def convert(value):
        if not check(value):
            raise ValueError(value)
        return converter(value)

    return convert


def load(config, supported):
    """
    Load configuration options from a JSON config file.

    :param config: path of the JSON document
    :param supported: iterable of supported options and their type.
    :raises ConfigurationError: unreadable file, unknown key or mistyped value
    """
    dispatcher = defaultdict(
        lambda: (_checked(_is(str)), "invalid value"),
        {
            bool: (_checked(_is(bool)), "invalid boolean value"),
            int: (_checked(_is(int)), "invalid integer value"),
            float: (_checked(_is(int, float), float), "invalid number"),
            Path: (_checked(_is(str), Path), "invalid path"),
            _ladder: (_sequence_of(int, _ladder), "invalid budget ladder"),
            _streams: (_sequence_of(str, _streams), "invalid stream list"),
            _game_option: (_checked(_is(dict), dict), "invalid game options"),
        },
    )
    path = Path(config)
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except OSError as ex:
        raise ConfigurationError(
            "config", f"can not read {path}: {ex.strerror}"
        ) from ex
    except ValueError as ex:
        raise ConfigurationError("config", f"{path}: invalid JSON: {ex}") from ex
    if not isinstance(document, dict):
        raise ConfigurationError("config", f"{path}: expected a JSON object")

    types = {option: _type for _type, option in supported if option not in _CLI_ONLY}
    settings = {}
    for option, value in document.items():
        if option not in types:
            raise ConfigurationError(option, "unknown configuration key")
        convert, error_msg = dispatcher[types[option]]
        try:
            settings[option] = convert(value)
        except (ValueError, argparse.ArgumentTypeError) as ex:
            raise ConfigurationError(option, f"{error_msg}: {value!r}") from ex
    return settings


def _conflicts(settings):
    conflicts = [
        ("--debug", settings.debug, "--quiet", settings.quiet),
        ("--debug", settings.debug, "--verbose", settings.verbose),
    ]
    for option1, value1, option2, value2 in conflicts:
        if value1 and value2:
            return option1, option2
    return None


class _ArgumentParser:
    """argparse.Argumentparser compatible argument parser.

    Allows inspection of options supported by the parser"""

    @classmethod
    def create_parser(cls):
        parser = cls(
            usage="seedfate [OPTIONS]",
            prog="seedfate",
            description="Measure how much the seed decides the outcome of a game",
        )
        parser.add_argument("-V", "--version", action="version", version=VERSION)
        parser.add_argument(
            "--config",
            type=Path,
            metavar="PATH",
            help="JSON document with experiment settings, flags take precedence",
        )
        parser.add_argument("--game", help="game to study")
        parser.add_argument("--mode", choices=MODES, help="experiment to run")
        parser.add_argument(
            "--seeds", dest="n_seeds", type=int, metavar="N", help="game seeds"
        )
        parser.add_argument(
            "--games", dest="n_games", type=int, metavar="N", help="games per seed"
        )
        parser.add_argument(
            "--budget", type=int, metavar="N", help="ISMCTS iterations, 0 for random"
        )
        parser.add_argument(
            "--budgets",
            type=_ladder,
            metavar="B1,B2,...",
            help="strictly increasing budget ladder of a skill sweep",
        )
        parser.add_argument("--agent", help="agent kind, random or ismcts")
        parser.add_argument(
            "--exploration", type=float, metavar="C", help="UCB1 exploration constant"
        )
        parser.add_argument(
            "--rollout-cap", type=int, metavar="N", help="rollout depth cap"
        )
        parser.add_argument(
            "--fix-stream",
            type=_streams,
            metavar="NAME[,NAME]",
            help="chance stream(s) held constant in disentangle mode",
        )
        parser.add_argument(
            "--root-seed", type=int, metavar="SEED", help="root of every derived seed"
        )
        parser.add_argument(
            "--workers", type=int, metavar="N", help="worker processes"
        )
        parser.add_argument(
            "--out", type=Path, metavar="DIR", help="directory for report files"
        )
        parser.add_argument(
            "--preset", choices=sorted(PRESETS), help="seeds x games preset"
        )
        parser.add_argument(
            "--boot", dest="n_boot", type=int, metavar="N", help="bootstrap resamples"
        )
        parser.add_argument(
            "--confidence", type=float, help="confidence of the null interval"
        )
        parser.add_argument("--trim", type=float, help="trim of the trimmed span")
        parser.add_argument(
            "--mixture", help="win probability mixture for verify-variance"
        )
        parser.add_argument(
            "--draws", dest="n_draws", type=int, metavar="N", help="Monte Carlo draws"
        )
        parser.add_argument(
            "--max-rounds", type=int, metavar="N", help="decisions before a forced draw"
        )
        parser.add_argument(
            "--dump-traces",
            action="store_true",
            default=None,
            help="write the traces of the first seed block",
        )
        parser.add_argument(
            "--game-option",
            dest="game_options",
            type=_game_option,
            action="append",
            metavar="KEY=VALUE",
            help="override a game constant",
        )
        parser.add_argument(
            "-q",
            "--quiet",
            action="store_true",
            default=None,
            help="don't print the summary",
        )
        parser.add_argument(
            "-v",
            "--verbose",
            action="store_true",
            default=None,
            help="log the progress of every seed block",
        )
        parser.add_argument(
            "--debug", action="store_true", default=None, help="log every decision"
        )
        parser.add_argument(
            "--color",
            choices=["always", "never", "auto"],
            default="auto",
            help="Mode which shall be used for coloring the output",
        )
        return parser

    def __init__(self, *args, **kwargs):
        self._options = []
        self._parser = argparse.ArgumentParser(*args, **kwargs)

    def add_argument(self, *args, **kwargs):
        """See argparser.Argumentparser:add_argument"""

        def is_boolean_option(a):
            return a.nargs is not None and isinstance(a.const, bool)

        action = self._parser.add_argument(*args, **kwargs)
        if not action.type:
            _type = bool if is_boolean_option(action) else None
        else:
            _type = action.type
        self._options.append((_type, action.dest))
        return action

    def __getattr__(self, item):
        return getattr(self._parser, item)

    @property
    def options(self):
        """
        Normalized options and their type except for -V, --version and -h, --help.

        :return: an iterable containing all options and their types.
        :rtype: Iterable[Tuple(type, str)]
        """
        return self._options


class _CliError(Exception):
    def __init__(self, exit_code, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._exit_code = exit_code

    @property
    def exit_code(self):
        return self._exit_code


def _agents(config):
    seats = build_game(config.game, **config.options).seats
    return [
        AgentConfig(
            kind=config.agent,
            budget=config.budget,
            exploration=config.exploration,
            rollout_depth_cap=config.rollout_cap,
        )
    ] * seats


def _interval(bounds):
    return "" if bounds is None else f"[{bounds[0]:.4f}, {bounds[1]:.4f}]"


def _metric_row(report, name, suffix=""):
    return (
        f"{name}{suffix}",
        f"{getattr(report, name):.4f}",
        _interval(report.intervals.get(name)),
    )


def _metric_rows(report, suffix=""):
    return [_metric_row(report, name, suffix) for name in METRICS]


def _analyse(config, distribution):
    report = metrics(
        distribution,
        config.confidence,
        config.trim,
        config.n_boot,
        derive_seed(config.root_seed, BOOTSTRAP),
    )
    write_seeds(config.out, distribution)
    write_histogram(config.out, distribution.win_rates)
    if config.dump_traces:
        write_traces(
            config.out, trace_block(distribution.spec, distribution.seeds[0])
        )
    rows = _metric_rows(report)
    rows.append(("null_interval", "", _interval(report.null_interval)))
    payload = {
        "distribution": distribution.to_dict(),
        "metrics": report.to_dict(),
        "variance_reduction": variance_reduction(distribution).to_dict(),
    }
    return payload, rows


def _run_distribution(config):
    distribution = run_distribution(
        config.game,
        config.n_seeds,
        config.n_games,
        _agents(config),
        config.root_seed,
        config.workers,
        game_options=config.options,
    )
    payload, rows = _analyse(config, distribution)
    return ExitCode.SUCCESS, payload, rows


def _run_disentangle(config):
    distribution = run_disentangled(
        config.game,
        config.fix_stream,
        config.n_seeds,
        config.n_games,
        _agents(config),
        config.root_seed,
        config.workers,
        game_options=config.options,
    )
    payload, rows = _analyse(config, distribution)
    return ExitCode.SUCCESS, payload, rows


def _run_mirror(config):
    pairs, distribution = run_mirrored(
        config.game,
        config.n_seeds,
        config.n_games // 2,
        _agents(config),
        config.root_seed,
        config.workers,
        game_options=config.options,
    )
    payload, rows = _analyse(config, distribution)
    payload["pairs"] = pairs.to_dict()
    rows.append(("pair_mean", f"{pairs.pair_mean:.4f}", ""))
    rows.append(("per_game_variance", f"{pairs.per_game_variance:.4f}", ""))
    return ExitCode.SUCCESS, payload, rows


def _sweep(config):
    sweep = run_skill_sweep(
        config.game,
        config.budgets,
        config.n_seeds,
        config.n_games,
        config.root_seed,
        config.workers,
        exploration=config.exploration,
        rollout_depth_cap=config.rollout_cap,
        game_options=config.options,
    )
    strongest = sweep.distributions[-1]
    write_seeds(config.out, strongest)
    write_histogram(config.out, strongest.win_rates)
    write_sweep(config.out, sweep)
    if config.dump_traces:
        write_traces(config.out, trace_block(strongest.spec, strongest.seeds[0]))
    return sweep


def _run_skill_sweep(config):
    sweep = _sweep(config)
    boot_seed = derive_seed(config.root_seed, BOOTSTRAP)
    rows, levels = [], []
    for budget, distribution in zip(sweep.budgets, sweep.distributions):
        report = metrics(
            distribution, config.confidence, config.trim, config.n_boot, boot_seed
        )
        levels.append({"budget": budget, "metrics": report.to_dict()})
        rows.extend(
            _metric_row(report, name, f"@{budget}")
            for name in ("grand_mean", "trimmed_span")
        )
    return ExitCode.SUCCESS, {"sweep": sweep.to_dict(), "levels": levels}, rows


def _run_nonmonotonic(config):
    sweep = _sweep(config)
    report = nonmonotonic_seeds(sweep, config.confidence)
    rows = [
        (f"nonmonotonic@{budget}", f"{fraction:.4f}", "")
        for budget, fraction in zip(report.budgets[1:-1], report.fractions)
    ]
    rows.append(("nonmonotonic_total", f"{report.total_fraction:.4f}", ""))
    payload = {"sweep": sweep.to_dict(), "nonmonotonic": report.to_dict()}
    return ExitCode.SUCCESS, payload, rows


def _run_verify_variance(config):
    checks = []
    for index, mixture in enumerate(config.mixtures):
        seed = derive_seed(config.root_seed, MIXTURE, index)
        checks.extend(verify_variance(mixture, config.n_draws, seed))
    rows = [
        (
            f"{check.mixture} {check.name}",
            f"{check.observed:.5f}",
            f"{check.expected:.5f} ± {check.tolerance:.5f} "
            f"{'pass' if check.passed else 'FAIL'}",
        )
        for check in checks
    ]
    failed = any(not check.passed for check in checks)
    status = ExitCode.CHECK_FAILED if failed else ExitCode.SUCCESS
    return status, {"checks": [check.to_dict() for check in checks]}, rows


_MODES = {
    "distribution": _run_distribution,
    "disentangle": _run_disentangle,
    "mirror": _run_mirror,
    "skill-sweep": _run_skill_sweep,
    "nonmonotonic": _run_nonmonotonic,
    "verify-variance": _run_verify_variance,
}


def run(config):
    """Execute an experiment and write its report files.

    :param config: a resolved :class:`~seedfate.settings.ExperimentConfig`
    :return: exit code and the rows ``(metric, value, interval)`` of the summary
    """
    Path(config.out).mkdir(parents=True, exist_ok=True)
    status, payload, rows = _MODES[config.mode](config)
    payload = {"mode": config.mode, **payload}
    write_report(config.out, VERSION, config.to_dict(), payload)
    return status, rows


class _Cli:
    def __init__(self):
        self._stdout_console = Console(file=sys.stdout)
        self._stderr_console = Console(file=sys.stderr)
        self._argparser = _ArgumentParser.create_parser()

    @property
    def stdout(self):
        return partial(
            self._stdout_console.print, no_wrap=True, overflow="ignore", crop=False
        )

    @property
    def stderr(self):
        return partial(
            self._stderr_console.print,
            no_wrap=True,
            overflow="ignore",
            crop=False,
            markup=False,
            highlight=False,
        )

    def _color_mode(self, mode):
        dispatcher = {"auto": "auto", "never": None, "always": "standard"}
        mode = dispatcher[mode]
        self._stdout_console = Console(file=sys.stdout, color_system=mode)
        self._stderr_console = Console(file=sys.stderr, color_system=mode)

    def _logging(self, settings):
        if settings.debug:
            level = logging.DEBUG
        elif settings.verbose:
            level = logging.INFO
        else:
            level = logging.WARNING
        logger = logging.getLogger("seedfate")
        for handler in [h for h in logger.handlers if isinstance(h, RichHandler)]:
            logger.removeHandler(handler)
        logger.addHandler(
            RichHandler(console=self._stderr_console, show_time=False, show_path=False)
        )
        logger.setLevel(level)

    def _load_settings(self, argv):
        """Loads the settings from all layers and merges them.

        Layers (CLI arguments > Config file)"""
        argv = sys.argv[1:] if argv is None else argv
        args = self._argparser.parse_args(argv)
        self._color_mode(args.color)
        args.game_options = dict(args.game_options or [])
        argument_settings = settings_from(args)
        if args.config is None:
            return argument_settings

        options = self._argparser.options
        configuration_settings = settings_from(load(args.config, options))
        return merge_settings(configuration_settings, argument_settings)

    def _summary(self, config, rows):
        table = Table(title=f"seedfate {config.mode}")
        table.add_column("metric")
        table.add_column("value", justify="right")
        table.add_column("interval")
        for row in rows:
            table.add_row(*row)
        self.stdout(table)

    def main(self, argv=None):
        try:
            settings = self._load_settings(argv)
            conflict = _conflicts(settings)
            if conflict:
                arg1, arg2 = conflict
                raise _CliError(
                    ExitCode.CONFIG_ERROR,
                    f"seedfate: error: options {arg1} and {arg2} "
                    "are mutually exclusive",
                )
            config = resolve(settings)
        except ConfigurationError as ex:
            self.stderr(f"seedfate: error: {ex}")
            return ExitCode.CONFIG_ERROR
        except _CliError as ex:
            self.stderr(f"{ex}")
            return ex.exit_code

        self._logging(settings)
        try:
            status, rows = run(config)
        except SeedfateError as ex:
            _logger.debug("run failed", exc_info=True)
            self.stderr(f"seedfate: error: {ex}")
            return ExitCode.RUNTIME_ERROR
        except OSError as ex:
            self.stderr(f"seedfate: error: out: {ex}")
            return ExitCode.RUNTIME_ERROR

        if not settings.quiet:
            self._summary(config, rows)
        return status
