"""Sampled run metrics, sweep aggregation, and CSV serialization."""

from __future__ import annotations

import io
from collections import defaultdict
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError

__all__ = [
    "COLUMNS",
    "MetricsSeries",
    "SweepResult",
    "aggregate_sweep",
    "export_comparison_csv",
    "export_csv",
    "export_ode_csv",
    "export_sweep_csv",
    "mean_series",
    "parse_csv",
]

STATE_COLUMNS = ("susceptible", "exposed", "infected", "removed")
COUNTER_COLUMNS = ("downloads", "scan_hits", "infections")
COLUMNS = ("time", *STATE_COLUMNS, "online", *COUNTER_COLUMNS)
ENDPOINT_METRICS = (*COUNTER_COLUMNS, *STATE_COLUMNS)

AXIS_FIELDS = {"network_size": "n", "vulnerability": "vulnerability", "reinfection": "reinfection"}


@dataclass(frozen=True, eq=False)
class MetricsSeries:
    """One row per sample time; counters are cumulative since t=0."""

    n: int
    times: np.ndarray
    susceptible: np.ndarray
    exposed: np.ndarray
    infected: np.ndarray
    removed: np.ndarray
    online: np.ndarray
    downloads: np.ndarray
    scan_hits: np.ndarray
    infections: np.ndarray
    config: object = field(default=None, repr=False)
    seed: int | None = None

    @classmethod
    def from_rows(cls, n: int, rows, config=None, seed=None) -> "MetricsSeries":
        data = np.asarray(rows, dtype=float).reshape(-1, len(COLUMNS))
        cols = {name: data[:, k].astype(np.int64) for k, name in enumerate(COLUMNS) if name != "time"}
        return cls(n=n, times=data[:, 0].copy(), config=config, seed=seed, **cols)

    def __len__(self):
        return len(self.times)

    def column(self, name: str) -> np.ndarray:
        return getattr(self, name)

    def final(self, name: str) -> int:
        return int(self.column(name)[-1])

    def population(self) -> np.ndarray:
        return self.susceptible + self.exposed + self.infected + self.removed

    def check(self, horizon: float | None = None) -> None:
        """Raise AssertionError if the series breaks its invariants."""
        if len(self) == 0:
            return
        assert np.all(np.diff(self.times) > 0), "sample times not strictly increasing"
        assert self.times[0] >= 0, "negative first sample time"
        if horizon is not None:
            assert self.times[-1] <= horizon + 1e-9, "sample beyond horizon"
        assert np.all(self.population() == self.n), "state counts do not sum to n"
        for name in COUNTER_COLUMNS:
            assert np.all(np.diff(self.column(name)) >= 0), f"{name} decreased"


def _write(text: str, destination) -> None:
    if destination is None:
        return
    if hasattr(destination, "write"):
        destination.write(text)
    else:
        Path(destination).write_bytes(text.encode("ascii"))


def export_csv(series: MetricsSeries, destination=None) -> str:
    """Series as CSV text (LF endings, 3-decimal times); also written to
    ``destination`` when given (a path or a text stream)."""
    out = io.StringIO()
    out.write(",".join(COLUMNS) + "\n")
    ints = np.column_stack([series.column(c) for c in COLUMNS[1:]]) if len(series) else ()
    for t, row in zip(series.times, ints):
        out.write(f"{t:.3f}," + ",".join(str(int(v)) for v in row) + "\n")
    text = out.getvalue()
    _write(text, destination)
    return text


def parse_csv(text: str, n: int | None = None) -> MetricsSeries:
    lines = text.splitlines()
    if not lines or lines[0] != ",".join(COLUMNS):
        raise ValueError("not a metrics CSV: unexpected header")
    rows = [[float(v) for v in line.split(",")] for line in lines[1:] if line]
    if n is None:
        n = int(sum(rows[0][1:5])) if rows else 0
    return MetricsSeries.from_rows(n, rows)


@dataclass(frozen=True)
class Stats:
    mean: float
    min: float
    max: float
    stddev: float
    count: int

    @classmethod
    def of(cls, values) -> "Stats":
        a = np.asarray(values, dtype=float)
        return cls(float(a.mean()), float(a.min()), float(a.max()), float(a.std()), len(a))


@dataclass(frozen=True)
class SweepResult:
    axis: str
    values: tuple
    seeds_per_value: int
    stats: dict = field(repr=False)  # (value, metric) -> Stats

    def mean(self, metric: str) -> np.ndarray:
        return np.array([self.stats[v, metric].mean for v in self.values])

    def cell(self, value, metric: str) -> Stats:
        return self.stats[value, metric]


def _config_key(config, axis_field: str):
    if config is None:
        return None
    d = asdict(config)
    d.pop(axis_field, None)
    d.pop("seed", None)
    return tuple(sorted(d.items()))


def aggregate_sweep(runs, axis: str = "network_size", metrics=ENDPOINT_METRICS) -> SweepResult:
    """Endpoint statistics grouped by axis value.

    ``runs`` is a list of ``(axis_value, seed, series)``. Axis values keep
    first-seen order. Standard deviations are population (ddof=0).
    """
    runs = list(runs)
    if not runs:
        raise ConfigError("aggregate_sweep needs at least one run")
    axis_field = AXIS_FIELDS.get(axis, axis)
    keys = {_config_key(s.config, axis_field) for _, _, s in runs}
    if len(keys) > 1:
        raise ConfigError(f"runs differ in settings other than {axis!r} and seed")

    grouped: dict = defaultdict(list)
    for value, _, series in runs:
        grouped[value].append(series)
    counts = {len(v) for v in grouped.values()}
    if len(counts) != 1:
        raise ConfigError("every axis value needs the same number of seeds")

    stats = {}
    for value, group in grouped.items():
        for metric in metrics:
            stats[value, metric] = Stats.of([s.final(metric) for s in group])
    return SweepResult(axis, tuple(grouped), counts.pop(), stats)


def _format_axis_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    return str(value)


def export_sweep_csv(result: SweepResult, destination=None) -> str:
    metrics = sorted({m for _, m in result.stats}, key=list(ENDPOINT_METRICS).index)
    lines = ["axis,value,metric,mean,min,max,stddev"]
    for value in result.values:
        for metric in metrics:
            s = result.stats[value, metric]
            lines.append(
                f"{result.axis},{_format_axis_value(value)},{metric},"
                f"{s.mean:.6f},{s.min:.6f},{s.max:.6f},{s.stddev:.6f}"
            )
    text = "\n".join(lines) + "\n"
    _write(text, destination)
    return text


def mean_series(series_list) -> dict[str, np.ndarray]:
    """Seed-mean of every column; all series must share sample times."""
    series_list = list(series_list)
    times = series_list[0].times
    for s in series_list[1:]:
        if len(s.times) != len(times) or not np.allclose(s.times, times):
            raise ValueError("series do not share sample times")
    out = {"time": times.copy()}
    for name in COLUMNS[1:]:
        out[name] = np.mean([s.column(name) for s in series_list], axis=0)
    return out


def export_mean_csv(means: dict[str, np.ndarray], destination=None) -> str:
    lines = [",".join(COLUMNS)]
    for k, t in enumerate(means["time"]):
        lines.append(f"{t:.3f}," + ",".join(f"{means[c][k]:.3f}" for c in COLUMNS[1:]))
    text = "\n".join(lines) + "\n"
    _write(text, destination)
    return text


def export_ode_csv(trajectory, destination=None) -> str:
    lines = ["time,s,e,i,r"]
    for t, row in zip(trajectory.times, trajectory.states):
        lines.append(f"{t:.6f}," + ",".join(f"{v:.9f}" for v in row))
    text = "\n".join(lines) + "\n"
    _write(text, destination)
    return text


def export_comparison_csv(matrix, destination=None) -> str:
    lines = ["virus," + ",".join(matrix.columns)]
    for name, row in zip(matrix.names, matrix.scores):
        lines.append(f"{name}," + ",".join(str(int(v)) for v in row))
    text = "\n".join(lines) + "\n"
    _write(text, destination)
    return text
