"""Randomness metrics, exact intervals and variance estimators"""

import math
from dataclasses import (
    asdict,
    dataclass,
    field,
)
from typing import (
    Any,
    Callable,
    Mapping,
    Sequence,
    Tuple,
)

import numpy as np
from scipy.stats import (
    binom,
    norm,
)

from seedfate.errors import (
    ConfigurationError,
    ContractError,
    InvalidArgumentError,
)

__all__ = [
    "MetricsReport",
    "Mixture",
    "NonMonotonicReport",
    "VarianceCheck",
    "binomial_interval",
    "bootstrap_ci",
    "entropy",
    "histogram",
    "metrics",
    "mirrored_game_variance",
    "nonmonotonic_seeds",
    "outlier_fraction",
    "parse_mixture",
    "single_game_variance",
    "span",
    "trimmed_span",
    "variance_reduction",
    "verify_variance",
]

BUCKETS = 50
DEFAULT_TRIM = 0.05
ABOVE, BELOW, NONE = "above-both", "below-both", "none"
_EPSILON = 1e-9


def _probability(value, name):
    if not 0.0 <= value <= 1.0 or math.isnan(value):
        raise InvalidArgumentError(f"{name} must lie in [0, 1], got {value}")
    return value


def _rates(values):
    """Win rates of a SeedDistribution or of a plain sequence as an array"""
    values = getattr(values, "win_rates", values)
    rates = np.asarray(values, dtype=float)
    if rates.ndim != 1 or rates.size == 0:
        raise InvalidArgumentError("at least one win rate is required")
    if np.any((rates < 0.0) | (rates > 1.0)) or np.any(np.isnan(rates)):
        raise InvalidArgumentError("win rates must lie in [0, 1]")
    return rates


def binomial_interval(n, p, confidence=0.99):
    """Central interval of the exact Binomial(n, p) distribution as win rates.

    The bounds are the ``alpha / 2`` and ``1 - alpha / 2`` quantiles of the
    cumulative distribution, ``alpha = 1 - confidence``, divided by n.

    >>> lo, hi = binomial_interval(1000, 0.5, 0.99)
    >>> round(lo, 3), round(hi, 3)
    (0.459, 0.541)
    >>> binomial_interval(100, 0.0)
    (0.0, 0.0)
    """
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"n must be a positive integer, got {n}")
    _probability(p, "p")
    if not 0.0 < confidence < 1.0:
        raise InvalidArgumentError(f"confidence must lie in (0, 1), got {confidence}")
    n = int(n)
    alpha = 1.0 - confidence
    cdf = np.cumsum(binom.pmf(np.arange(n + 1), n, p))
    lo, hi = np.searchsorted(cdf, [alpha / 2, 1.0 - alpha / 2], side="left")
    return min(int(lo), n) / n, min(int(hi), n) / n


def _buckets(rates):
    return np.minimum(np.floor(rates * BUCKETS + _EPSILON), BUCKETS - 1).astype(int)


def entropy(win_rates):
    """Shannon entropy in nats of the win rates in 2% buckets.

    >>> entropy([0.5, 0.51])
    0.0
    >>> round(entropy([0.0, 1.0]), 6)
    0.693147
    """
    counts = np.bincount(_buckets(_rates(win_rates)), minlength=BUCKETS)
    shares = counts[counts > 0] / counts.sum()
    return float(-np.sum(shares * np.log(shares))) + 0.0


def histogram(win_rates):
    """Rows ``(bucket_lo, bucket_hi, count)`` of all 50 buckets"""
    counts = np.bincount(_buckets(_rates(win_rates)), minlength=BUCKETS)
    return [
        (round(i / BUCKETS, 2), round((i + 1) / BUCKETS, 2), int(c))
        for i, c in enumerate(counts)
    ]


def _at_least_two(win_rates):
    rates = _rates(win_rates)
    if rates.size < 2:
        raise InvalidArgumentError("at least two win rates are required")
    return rates


def span(win_rates):
    """Largest minus smallest win rate.

    >>> span([0.0, 0.5, 1.0])
    1.0
    """
    rates = _at_least_two(win_rates)
    return float(rates.max() - rates.min())


def trimmed_span(win_rates, trim=DEFAULT_TRIM):
    """Span after dropping ``floor(trim / 2 * n)`` values from either end"""
    if not 0.0 <= trim < 1.0:
        raise InvalidArgumentError(f"trim must lie in [0, 1), got {trim}")
    rates = np.sort(_at_least_two(win_rates))
    cut = int(math.floor(trim / 2 * rates.size + _EPSILON))
    kept = rates[cut : rates.size - cut]
    if kept.size == 0:
        return 0.0
    return float(kept[-1] - kept[0])


def _outliers(rates, n_games, confidence):
    lo, hi = binomial_interval(n_games, float(np.mean(rates)), confidence)
    outside = (rates < lo - _EPSILON) | (rates > hi + _EPSILON)
    return float(np.mean(outside))


def outlier_fraction(dist, confidence=0.99):
    """Share of seeds whose win rate lies strictly outside the null interval.

    The null interval is the exact binomial interval around the grand mean
    of the distribution.
    """
    return _outliers(_rates(dist), dist.n_games, confidence)


def single_game_variance(dist):
    """Variance of one game outcome, ``p(1 - p)`` of the grand mean"""
    p = float(np.mean(_rates(dist)))
    return p * (1.0 - p)


def mirrored_game_variance(dist):
    """Per game variance of seat swapped pairs, the mean of ``p_i(1 - p_i)``.

    >>> round(mirrored_game_variance([0.2, 0.8]), 12)
    0.16
    """
    rates = _rates(dist)
    return float(np.mean(rates * (1.0 - rates)))


def bootstrap_ci(statistic, sample, n_boot=1000, confidence=0.95, boot_seed=0):
    """Percentile bootstrap interval of ``statistic`` over ``sample``.

    :param statistic: function of a one dimensional array
    :param sample: the observations
    :param n_boot: number of resamples
    :param confidence: coverage of the interval
    :param boot_seed: seed of the resampling, the result is a pure function of it
    """
    values = np.asarray(sample, dtype=float)
    if values.size == 0:
        raise InvalidArgumentError("can not bootstrap an empty sample")
    if n_boot < 1:
        raise InvalidArgumentError("n_boot must be at least 1")
    if not 0.0 < confidence < 1.0:
        raise InvalidArgumentError(f"confidence must lie in (0, 1), got {confidence}")
    rng = np.random.default_rng(boot_seed)
    indices = rng.integers(0, values.size, size=(n_boot, values.size))
    estimates = np.array([statistic(values[i]) for i in indices])
    alpha = 1.0 - confidence
    lo, hi = np.quantile(estimates, [alpha / 2, 1.0 - alpha / 2])
    return float(lo), float(hi)


@dataclass(frozen=True)
class MetricsReport:
    entropy: float
    span: float
    trimmed_span: float
    outlier_fraction: float
    grand_mean: float
    n_seeds: int
    n_games: int
    null_interval: Tuple[float, float]
    confidence: float = 0.99
    trim: float = DEFAULT_TRIM
    draw_fraction: float = 0.0
    forced_draws: int = 0
    intervals: Mapping[str, Tuple[float, float]] = field(default_factory=dict)

    def to_dict(self):
        report = asdict(self)
        report["null_interval"] = list(self.null_interval)
        report["intervals"] = {k: list(v) for k, v in self.intervals.items()}
        return report


METRICS = ("entropy", "span", "trimmed_span", "outlier_fraction", "grand_mean")


def _statistics(n_games, confidence, trim) -> Mapping[str, Callable]:
    return {
        "entropy": entropy,
        "span": span,
        "trimmed_span": lambda r: trimmed_span(r, trim),
        "outlier_fraction": lambda r: _outliers(r, n_games, confidence),
        "grand_mean": lambda r: float(np.mean(r)),
    }


def metrics(dist, confidence=0.99, trim=DEFAULT_TRIM, n_boot=0, boot_seed=0):
    """The four randomness metrics of a seed distribution.

    :param n_boot: bootstrap resamples for the metric intervals, 0 for none
    """
    rates = _at_least_two(dist)
    statistics = _statistics(dist.n_games, confidence, trim)
    intervals = {}
    if n_boot:
        intervals = {
            name: bootstrap_ci(statistics[name], rates, n_boot, 0.95, boot_seed)
            for name in METRICS
        }
    return MetricsReport(
        entropy=entropy(rates),
        span=span(rates),
        trimmed_span=trimmed_span(rates, trim),
        outlier_fraction=_outliers(rates, dist.n_games, confidence),
        grand_mean=float(np.mean(rates)),
        n_seeds=int(rates.size),
        n_games=dist.n_games,
        null_interval=binomial_interval(
            dist.n_games, float(np.mean(rates)), confidence
        ),
        confidence=confidence,
        trim=trim,
        draw_fraction=getattr(dist, "draw_fraction", 0.0),
        forced_draws=int(sum(getattr(dist, "forced_draws", ()))),
        intervals=intervals,
    )


@dataclass(frozen=True)
class VarianceReduction:
    """Single game against mirrored pair design for an ``n_games`` experiment"""

    single_variance: float
    mirrored_variance: float
    ratio: float
    n_games: int
    single_width: float
    mirrored_width: float

    def to_dict(self):
        return asdict(self)


def variance_reduction(dist, n_games=1000, confidence=0.95):
    """How much seat swapped pairs would narrow a win rate estimate"""
    single = single_game_variance(dist)
    mirrored = mirrored_game_variance(dist)
    ratio = mirrored / single if single > 0 else 1.0
    lo, hi = binomial_interval(n_games, float(np.mean(_rates(dist))), confidence)
    return VarianceReduction(
        single_variance=single,
        mirrored_variance=mirrored,
        ratio=ratio,
        n_games=n_games,
        single_width=hi - lo,
        mirrored_width=(hi - lo) * math.sqrt(ratio),
    )


@dataclass(frozen=True)
class NonMonotonicReport:
    """Seeds significantly above or below both bracketing budgets.

    ``flags[j][i]`` belongs to the interior budget ``budgets[j + 1]`` and
    seed ``i``.
    """

    budgets: Tuple[int, ...]
    seeds: Tuple[int, ...]
    flags: Tuple[Tuple[str, ...], ...]
    confidence: float
    critical_value: float
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def _fraction(self, row, kinds):
        return sum(flag in kinds for flag in row) / len(row)

    @property
    def above_fractions(self):
        return tuple(self._fraction(row, (ABOVE,)) for row in self.flags)

    @property
    def below_fractions(self):
        return tuple(self._fraction(row, (BELOW,)) for row in self.flags)

    @property
    def fractions(self):
        return tuple(self._fraction(row, (ABOVE, BELOW)) for row in self.flags)

    @property
    def total_fraction(self):
        flagged = [any(flag != NONE for flag in column) for column in zip(*self.flags)]
        return sum(flagged) / len(self.seeds)

    def to_dict(self):
        return {
            "budgets": list(self.budgets),
            "interior_budgets": list(self.budgets[1:-1]),
            "confidence": self.confidence,
            "critical_value": self.critical_value,
            "above_fractions": list(self.above_fractions),
            "below_fractions": list(self.below_fractions),
            "fractions": list(self.fractions),
            "total_fraction": self.total_fraction,
            "seeds": list(self.seeds),
            "flags": [list(row) for row in self.flags],
            "metadata": dict(self.metadata),
        }


def _wins(rate, n):
    # draw halves count toward wins
    return math.ceil(rate * n - _EPSILON)


def two_proportion_z(wins_a, wins_b, n_a, n_b):
    """Pooled two-proportion z statistic of ``a`` exceeding ``b``.

    >>> round(two_proportion_z(700, 500, 1000, 1000), 2)
    9.13
    """
    pooled = (wins_a + wins_b) / (n_a + n_b)
    if pooled in (0.0, 1.0):
        return 0.0
    error = math.sqrt(pooled * (1 - pooled) * (1 / n_a + 1 / n_b))
    return (wins_a / n_a - wins_b / n_b) / error


def nonmonotonic_seeds(sweep, confidence=0.99):
    """Flag seeds whose win rate at an interior budget beats or trails both neighbours.

    Every comparison is a one-sided two-proportion z-test at the given
    confidence.
    """
    if len(sweep.budgets) < 3:
        raise ContractError("non-monotonic seeds need at least three budgets")
    seeds = tuple(sweep.distributions[0].seeds)
    if any(tuple(d.seeds) != seeds for d in sweep.distributions):
        raise ContractError("every budget must play the identical seed list")
    critical = float(norm.ppf(confidence))
    counts = [
        ([_wins(r, d.n_games) for r in d.win_rates], d.n_games)
        for d in sweep.distributions
    ]
    flags = []
    for middle in range(1, len(counts) - 1):
        (left, n_left), (centre, n_centre), (right, n_right) = counts[
            middle - 1 : middle + 2
        ]
        row = []
        for i in range(len(seeds)):
            z_left = two_proportion_z(centre[i], left[i], n_centre, n_left)
            z_right = two_proportion_z(centre[i], right[i], n_centre, n_right)
            if z_left > critical and z_right > critical:
                row.append(ABOVE)
            elif z_left < -critical and z_right < -critical:
                row.append(BELOW)
            else:
                row.append(NONE)
        flags.append(tuple(row))
    return NonMonotonicReport(
        budgets=tuple(sweep.budgets),
        seeds=seeds,
        flags=tuple(flags),
        confidence=confidence,
        critical_value=critical,
        metadata={
            "test": "two-proportion z, one-sided",
            "draws": "half wins rounded up",
        },
    )


@dataclass(frozen=True)
class Mixture:
    """Distribution of the per seed win probability ``p``"""

    kind: str
    parameters: Tuple[float, ...]

    def sample(self, rng, size):
        if self.kind == "point":
            return np.full(size, self.parameters[0])
        if self.kind == "two-point":
            return rng.choice(np.asarray(self.parameters), size=size)
        return rng.beta(*self.parameters, size=size)

    @property
    def mean(self):
        if self.kind == "beta":
            a, b = self.parameters
            return a / (a + b)
        return float(np.mean(self.parameters))

    @property
    def mean_pq(self):
        """Expectation of ``p(1 - p)``"""
        if self.kind == "beta":
            a, b = self.parameters
            return a * b / ((a + b) * (a + b + 1))
        values = np.asarray(self.parameters)
        return float(np.mean(values * (1 - values)))

    def __str__(self):
        return f"{self.kind}:{','.join(f'{p:g}' for p in self.parameters)}"


_MIXTURE_ARITY = {"point": 1, "two-point": 2, "beta": 2}
CATALOG = ("point:0.5", "two-point:0,1", "two-point:0.2,0.8", "beta:2,5")


def parse_mixture(text):
    """Parse ``point:P``, ``two-point:A,B`` or ``beta:A,B``.

    >>> parse_mixture("beta:2,5").mean
    0.2857142857142857
    """
    kind, _, values = text.partition(":")
    if kind not in _MIXTURE_ARITY:
        raise ConfigurationError(
            "mixture",
            f"unknown mixture {kind!r}; valid mixtures: {', '.join(_MIXTURE_ARITY)}",
        )
    try:
        parameters = tuple(float(v) for v in values.split(","))
    except ValueError as ex:
        raise ConfigurationError("mixture", f"invalid parameters in {text!r}") from ex
    if len(parameters) != _MIXTURE_ARITY[kind]:
        raise ConfigurationError(
            "mixture", f"{kind} takes {_MIXTURE_ARITY[kind]} parameter(s), got {text!r}"
        )
    if kind == "beta" and min(parameters) <= 0:
        raise ConfigurationError("mixture", "beta parameters must be positive")
    if kind != "beta" and not all(0 <= p <= 1 for p in parameters):
        raise ConfigurationError("mixture", "probabilities must lie in [0, 1]")
    return Mixture(kind, parameters)


@dataclass(frozen=True)
class VarianceCheck:
    mixture: str
    name: str
    expected: float
    observed: float
    tolerance: float

    @property
    def passed(self):
        return abs(self.observed - self.expected) <= self.tolerance

    def to_dict(self):
        report = asdict(self)
        report["passed"] = self.passed
        return report


def _variance_tolerance(variance, fourth, n):
    """Three standard errors of a sample variance plus the mean estimation term"""
    return 3.0 * math.sqrt(max(fourth - variance**2, 0.0) / n) + 9.0 * variance / n


def verify_variance(mixture, n_draws=100_000, seed=0):
    """Monte Carlo check of the single game and the mirrored pair variance.

    Seeds draw ``p`` from the mixture. A single game is a Bernoulli(p)
    draw, a mirrored pair adds the outcome of the swapped game,
    Bernoulli(1 - p), for the same seed.

    :param mixture: a :class:`Mixture` or its textual form
    :return: list of :class:`VarianceCheck`
    """
    if isinstance(mixture, str):
        mixture = parse_mixture(mixture)
    if n_draws < 2:
        raise InvalidArgumentError("n_draws must be at least 2")
    rng = np.random.default_rng(seed)
    p = mixture.sample(rng, n_draws)
    single = (rng.random(n_draws) < p).astype(float)
    swapped = (rng.random(n_draws) < 1.0 - p).astype(float)
    pairs = single + swapped

    mean, pq = mixture.mean, mixture.mean_pq
    variance = mean * (1 - mean)
    pair_variance = 2 * pq
    name = str(mixture)
    return [
        VarianceCheck(
            name,
            "single mean",
            mean,
            float(single.mean()),
            3 * math.sqrt(variance / n_draws),
        ),
        VarianceCheck(
            name,
            "single variance",
            variance,
            float(single.var()),
            _variance_tolerance(variance, variance * (1 - 3 * variance), n_draws),
        ),
        VarianceCheck(
            name,
            "pair mean",
            1.0,
            float(pairs.mean()),
            3 * math.sqrt(pair_variance / n_draws),
        ),
        VarianceCheck(
            name,
            "pair variance",
            pair_variance,
            float(pairs.var()),
            _variance_tolerance(pair_variance, pair_variance, n_draws),
        ),
    ]
