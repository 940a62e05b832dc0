import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from p2pvirus.errors import ConfigError
from p2pvirus.metrics import (
    COLUMNS,
    MetricsSeries,
    aggregate_sweep,
    export_csv,
    export_sweep_csv,
    mean_series,
    parse_csv,
)
from p2pvirus.scenario import ScenarioConfig

HEADER = "time,susceptible,exposed,infected,removed,online,downloads,scan_hits,infections\n"


def make_series(endpoint=0, n=10, config=None, samples=3):
    rows = [(k * 1.0, n, 0, 0, 0, n, endpoint * k // max(1, samples - 1), 0, 0) for k in range(samples)]
    return MetricsSeries.from_rows(n, rows, config=config)


@st.composite
def series_strategy(draw):
    n = draw(st.integers(1, 1000))
    k = draw(st.integers(0, 20))
    gaps = draw(st.lists(st.integers(1, 10_000), min_size=k, max_size=k))
    times = np.cumsum([0] + gaps[:-1]) / 1000 if k else []
    rows, counters = [], [0, 0, 0]
    for t in times:
        s = draw(st.integers(0, n))
        e = draw(st.integers(0, n - s))
        i = draw(st.integers(0, n - s - e))
        counters = [c + draw(st.integers(0, 50)) for c in counters]
        rows.append((t, s, e, i, n - s - e - i, draw(st.integers(0, n)), *counters))
    return MetricsSeries.from_rows(n, rows)


class TestExport:
    def test_empty_series(self):
        assert export_csv(MetricsSeries.from_rows(10, [])) == HEADER

    def test_initial_row(self):
        series = MetricsSeries.from_rows(10, [(0.0, 10, 0, 0, 0, 10, 0, 0, 0)])
        assert export_csv(series) == HEADER + "0.000,10,0,0,0,10,0,0,0\n"

    def test_writes_exact_bytes(self, tmp_path):
        series = make_series(5)
        text = export_csv(series, tmp_path / "x.csv")
        assert (tmp_path / "x.csv").read_bytes() == text.encode()
        assert b"\r" not in (tmp_path / "x.csv").read_bytes()

    def test_unwritable_destination(self, tmp_path):
        with pytest.raises(OSError):
            export_csv(make_series(), tmp_path / "missing" / "x.csv")

    @settings(max_examples=60)
    @given(series_strategy())
    def test_round_trip(self, series):
        text = export_csv(series)
        back = parse_csv(text, n=series.n)
        for name in COLUMNS[1:]:
            assert np.array_equal(back.column(name), series.column(name))
        assert np.allclose(back.times, series.times, atol=5e-4)
        assert all(len(line.split(",")) == len(COLUMNS) for line in text.splitlines())

    @given(series_strategy(), st.sampled_from(COLUMNS[1:]), st.data())
    def test_injective(self, series, column, data):
        if len(series) == 0:
            return
        k = data.draw(st.integers(0, len(series) - 1))
        other = {name: series.column(name).copy() for name in COLUMNS[1:]}
        other[column][k] += 1
        changed = MetricsSeries(n=series.n, times=series.times, **other)
        assert export_csv(changed) != export_csv(series)


class TestAggregate:
    def test_single_run(self):
        result = aggregate_sweep([(100, 0, make_series(7))])
        cell = result.cell(100, "downloads")
        assert (cell.mean, cell.stddev, cell.count) == (7, 0, 1)

    def test_two_seeds(self):
        result = aggregate_sweep([(100, 0, make_series(10)), (100, 1, make_series(20))])
        cell = result.cell(100, "downloads")
        assert (cell.mean, cell.min, cell.max) == (15, 10, 20)

    def test_grouping(self):
        runs = [(v, s, make_series(v + s)) for v in (100, 200, 400) for s in range(5)]
        result = aggregate_sweep(runs)
        assert result.values == (100, 200, 400) and result.seeds_per_value == 5
        assert all(result.cell(v, "downloads").count == 5 for v in result.values)
        assert result.mean("downloads").tolist() == [102, 202, 402]

    def test_mixed_configs_rejected(self):
        a = make_series(config=ScenarioConfig(n=10, ttl=3))
        b = make_series(config=ScenarioConfig(n=10, ttl=4))
        with pytest.raises(ConfigError):
            aggregate_sweep([(1, 0, a), (2, 0, b)])

    def test_axis_and_seed_may_differ(self):
        a = make_series(config=ScenarioConfig(n=10, vulnerability=0.5, seed=1))
        b = make_series(config=ScenarioConfig(n=10, vulnerability=1.0, seed=2))
        assert aggregate_sweep([(0.5, 1, a), (1.0, 2, b)], "vulnerability").values == (0.5, 1.0)

    def test_unequal_seed_counts(self):
        with pytest.raises(ConfigError):
            aggregate_sweep([(1, 0, make_series()), (1, 1, make_series()), (2, 0, make_series())])

    def test_empty(self):
        with pytest.raises(ConfigError):
            aggregate_sweep([])

    @given(st.lists(st.lists(st.integers(0, 10**6), min_size=3, max_size=3), min_size=1, max_size=6))
    def test_mean_within_range(self, endpoints):
        runs = [(v, s, make_series(e)) for s, row in enumerate(endpoints) for v, e in enumerate(row)]
        result = aggregate_sweep(runs)
        for cell in result.stats.values():
            assert cell.min <= cell.mean <= cell.max

    def test_sweep_csv(self):
        result = aggregate_sweep([(True, 0, make_series(4)), (False, 0, make_series(2))], "reinfection")
        lines = export_sweep_csv(result).splitlines()
        assert lines[0] == "axis,value,metric,mean,min,max,stddev"
        assert "reinfection,true,downloads,4.000000,4.000000,4.000000,0.000000" in lines
        assert all(len(line.split(",")) == 7 for line in lines)


def test_mean_series():
    means = mean_series([make_series(10), make_series(20)])
    assert means["downloads"].tolist() == [0, 7.5, 15]
    with pytest.raises(ValueError):
        mean_series([make_series(samples=3), make_series(samples=4)])
