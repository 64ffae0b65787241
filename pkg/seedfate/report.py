"""Report files: report.json, seeds.csv, histogram.csv, sweep.csv and traces.jsonl"""

import csv
import json
from pathlib import Path

from seedfate.stats import histogram

__all__ = [
    "REPORT",
    "SEEDS",
    "HISTOGRAM",
    "SWEEP",
    "TRACES",
    "write_histogram",
    "write_report",
    "write_seeds",
    "write_sweep",
    "write_traces",
]

REPORT = "report.json"
SEEDS = "seeds.csv"
HISTOGRAM = "histogram.csv"
SWEEP = "sweep.csv"
TRACES = "traces.jsonl"


def _rate(value):
    return repr(float(value))


def _rows(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as csvfile:
        writer = csv.writer(csvfile, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
    return path


def write_report(out, version, config, payload):
    """Write ``report.json``.

    The file echoes the configuration and the software version so the
    experiment can be reproduced from the report alone. Keys are sorted
    and the output does not depend on the number of workers.

    :param out: report directory, created if missing
    :param version: software version string
    :param config: the resolved configuration as a dict
    :param payload: mode specific results
    """
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    document = {"version": version, "config": config, **payload}
    path = out / REPORT
    with open(path, "w", encoding="utf-8") as report:
        json.dump(document, report, sort_keys=True, indent=2)
        report.write("\n")
    return path


def write_seeds(out, distribution):
    """Write ``seeds.csv`` with one ``seed,win_rate,n_games`` row per seed"""
    rows = (
        (seed, _rate(rate), distribution.n_games)
        for seed, rate in zip(distribution.seeds, distribution.win_rates)
    )
    return _rows(Path(out) / SEEDS, ("seed", "win_rate", "n_games"), rows)


def write_histogram(out, win_rates):
    """Write the 50 bucket ``histogram.csv``"""
    rows = ((_rate(lo), _rate(hi), count) for lo, hi, count in histogram(win_rates))
    return _rows(Path(out) / HISTOGRAM, ("bucket_lo", "bucket_hi", "count"), rows)


def write_sweep(out, sweep):
    """Write ``sweep.csv``, the per seed curves along the budget ladder"""
    rows = (
        (budget, seed, _rate(rate), distribution.n_games)
        for budget, distribution in zip(sweep.budgets, sweep.distributions)
        for seed, rate in zip(distribution.seeds, distribution.win_rates)
    )
    return _rows(Path(out) / SWEEP, ("budget", "seed", "win_rate", "n_games"), rows)


def write_traces(out, traces):
    """Write one JSON object per game to ``traces.jsonl``"""
    path = Path(out) / TRACES
    with open(path, "w", encoding="utf-8") as jsonl:
        for trace in traces:
            jsonl.write(json.dumps(trace, sort_keys=True))
            jsonl.write("\n")
    return path
