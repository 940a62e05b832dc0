"""The five experiment families as seeded sweeps with machine-checked
properties: downloads and scan-hits against network size, re-infection
against no re-infection, infected nodes against vulnerability, and the
S/E/I/R populations over time next to the matching ODE.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .epidemic import EpidemicParams, OdeModel, OdeState, OdeTrajectory, integrate_ode
from .errors import ConfigError
from .metrics import MetricsSeries, SweepResult, aggregate_sweep, mean_series
from .scenario import ScenarioConfig
from .simcore import effective_beta, init_scenario, run

__all__ = [
    "BASE_SCENARIO",
    "DEFAULT_AXES",
    "MEAN_FIELD_SCENARIO",
    "EXPERIMENTS",
    "ExperimentResult",
    "matched_ode",
    "run_experiment",
    "run_seeds",
]

BASE_SCENARIO = ScenarioConfig(
    n=200,
    avg_degree=6.0,
    ttl=7,
    virus="Swen",
    initial_infected=5,
    vulnerability=0.5,
    reinfection=True,
    query_rate=1.0,
    download_prob=0.8,
    exec_rate=1.0,
    recover_rate=0.2,
    horizon=40.0,
    keyword_mix=0.5,
    seed=0,
)

# Complete graph, churn off, everyone vulnerable, every peer sharing a
# legitimate file under each disguise name: the regime where the engine's
# infection force is mass-action and the SEIS ODE should track it.
MEAN_FIELD_SCENARIO = ScenarioConfig(
    n=500,
    avg_degree=499.0,
    ttl=1,
    virus="Swen",
    initial_infected=25,
    vulnerability=1.0,
    reinfection=True,
    query_rate=1.0,
    download_prob=1.0,
    exec_rate=1.0,
    recover_rate=0.1,
    horizon=40.0,
    keyword_mix=0.5,
    decoy_share=1.0,
    seed=0,
)

DEFAULT_AXES = {
    "downloads-vs-size": (100, 200, 400, 800),
    "scanhits-vs-size": (100, 200, 400, 800),
    "reinfection": (True, False),
    "vulnerability": (0.25, 0.5, 0.75, 1.0),
    "populations": (),
}
EXPERIMENTS = tuple(DEFAULT_AXES)
DEFAULT_SEEDS = 10


@dataclass
class RunRecord:
    value: object
    seed: int
    series: MetricsSeries
    exposures: int
    si_integral: float


@dataclass
class ExperimentResult:
    name: str
    axis: str
    records: list
    sweep: SweepResult
    passed: bool
    summary: str
    details: dict = field(default_factory=dict)

    @property
    def runs(self):
        return [(r.value, r.seed, r.series) for r in self.records]

    def status_line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.summary}"


def _run_one(args) -> RunRecord:
    value, config = args
    state = init_scenario(config)
    series = run(state)
    return RunRecord(value, config.seed, series, state.exposures, state.si_integral)


def run_seeds(configs, jobs: int = 1) -> list[RunRecord]:
    """Run ``(axis_value, config)`` pairs, preserving input order."""
    configs = list(configs)
    if jobs > 1 and len(configs) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_one, configs))
    return [_run_one(c) for c in configs]


def _seeds(base: ScenarioConfig, k: int) -> list[int]:
    if k < 1:
        raise ConfigError("need at least one seed per point")
    return [base.seed + j for j in range(k)]


def _sweep(base, field_name, values, seeds, jobs):
    configs = [(v, base.replace(**{field_name: v}, seed=s)) for v in values for s in _seeds(base, seeds)]
    return run_seeds(configs, jobs)


def _strictly_increasing(a) -> bool:
    return bool(np.all(np.diff(np.asarray(a, dtype=float)) > 0))


def _fmt(values) -> str:
    return "[" + ", ".join(f"{v:.1f}" for v in values) + "]"


def _size_experiment(name, metric, base, values, seeds, jobs):
    values = tuple(int(v) for v in values)
    records = _sweep(base, "n", values, seeds, jobs)
    sweep = aggregate_sweep([(r.value, r.seed, r.series) for r in records], "network_size")
    means = sweep.mean(metric)
    passed = _strictly_increasing(means)
    summary = f"mean endpoint {metric} by size {list(values)} = {_fmt(means)} (strictly increasing: {passed})"
    return ExperimentResult(name, "network_size", records, sweep, passed, summary)


def downloads_vs_size(base=BASE_SCENARIO, values=DEFAULT_AXES["downloads-vs-size"], seeds=DEFAULT_SEEDS, jobs=1):
    return _size_experiment("downloads-vs-size", "downloads", base, values, seeds, jobs)


def scanhits_vs_size(base=BASE_SCENARIO, values=DEFAULT_AXES["scanhits-vs-size"], seeds=DEFAULT_SEEDS, jobs=1):
    return _size_experiment("scanhits-vs-size", "scan_hits", base, values, seeds, jobs)


def reinfection(base=BASE_SCENARIO, values=(True, False), seeds=20, jobs=1, min_ratio=1.2):
    """Same configuration with the re-infection switch on and off.

    Passes when mean cumulative infections with re-infection are at least
    ``min_ratio`` times those without, and the seed-mean infections curve
    with re-infection is never below the one without.
    """
    records = _sweep(base, "reinfection", (True, False), seeds, jobs)
    sweep = aggregate_sweep([(r.value, r.seed, r.series) for r in records], "reinfection")
    on = mean_series(r.series for r in records if r.value)["infections"]
    off = mean_series(r.series for r in records if not r.value)["infections"]
    ratio = on[-1] / off[-1] if off[-1] > 0 else float("inf")
    dominates = bool(np.all(on >= off))
    passed = ratio >= min_ratio and dominates
    summary = (
        f"mean infections with re-infection {on[-1]:.1f} vs without {off[-1]:.1f} "
        f"(ratio {ratio:.2f}, need >= {min_ratio}); curve dominance: {dominates}"
    )
    return ExperimentResult("reinfection", "reinfection", records, sweep, passed, summary,
                            {"ratio": ratio, "dominates": dominates, "curve_on": on, "curve_off": off})


def vulnerability(base=BASE_SCENARIO, values=DEFAULT_AXES["vulnerability"], seeds=DEFAULT_SEEDS, jobs=1):
    values = tuple(float(v) for v in values)
    records = _sweep(base, "vulnerability", values, seeds, jobs)
    sweep = aggregate_sweep([(r.value, r.seed, r.series) for r in records], "vulnerability")
    means = sweep.mean("infected")
    passed = _strictly_increasing(means)
    summary = f"mean endpoint infected nodes by vulnerability {list(values)} = {_fmt(means)} (strictly increasing: {passed})"
    return ExperimentResult("vulnerability", "vulnerability", records, sweep, passed, summary)


def matched_ode(records, config: ScenarioConfig, dt: float = 0.01) -> tuple[OdeTrajectory, float]:
    """ODE trajectory matching a set of runs, and the fitted infection rate.

    SEIS when re-infection is on, SEIR otherwise. The rate is the pooled
    estimate ``n * exposures / integral(S*I dt)``; sigma and delta are the
    configured execution and recovery rates.
    """
    beta = effective_beta(_Fitted(r, config) for r in records)
    model = OdeModel.SEIS if config.reinfection else OdeModel.SEIR
    params = EpidemicParams(beta, config.exec_rate, config.recover_rate, config.reinfection, config.vulnerability)
    i0 = config.initial_infected / config.n
    return integrate_ode(OdeState.from_infected(i0), params, model, config.horizon, dt), beta


@dataclass
class _Fitted:
    record: RunRecord
    config: ScenarioConfig

    @property
    def exposures(self):
        return self.record.exposures

    @property
    def si_integral(self):
        return self.record.si_integral


def populations(base=BASE_SCENARIO, values=(), seeds=DEFAULT_SEEDS, jobs=1, tolerance=None):
    """S/E/I/R over time for several seeds, with the matched ODE.

    Always checks that every sample row conserves the population. With a
    ``tolerance`` it also requires the seed-mean infected fraction to stay
    within that distance of the ODE at every sample time.
    """
    if values:
        raise ConfigError("populations takes no axis values")
    records = run_seeds([(base.n, base.replace(seed=s)) for s in _seeds(base, seeds)], jobs)
    sweep = aggregate_sweep([(r.value, r.seed, r.series) for r in records], "network_size")
    conserved = all(np.all(r.series.population() == base.n) for r in records)
    means = mean_series(r.series for r in records)
    trajectory, beta = matched_ode(records, base)
    ode_i = np.interp(means["time"], trajectory.times, trajectory.i)
    deviation = float(np.max(np.abs(means["infected"] / base.n - ode_i)))
    passed = conserved and (tolerance is None or deviation <= tolerance)
    summary = f"S+E+I+R = {base.n} on every row: {conserved}; max |i_sim - i_ode| = {deviation:.4f} (beta = {beta:.4f})"
    if tolerance is not None:
        summary += f", tolerance {tolerance}"
    return ExperimentResult("populations", "none", records, sweep, passed, summary,
                            {"means": means, "ode": trajectory, "beta": beta, "deviation": deviation})


_RUNNERS = {
    "downloads-vs-size": downloads_vs_size,
    "scanhits-vs-size": scanhits_vs_size,
    "reinfection": reinfection,
    "vulnerability": vulnerability,
    "populations": populations,
}


def run_experiment(name: str, base: ScenarioConfig = BASE_SCENARIO, values=None, seeds=None, jobs: int = 1):
    if name not in _RUNNERS:
        raise ConfigError(f"unknown experiment {name!r}; valid: {', '.join(EXPERIMENTS)}")
    kwargs = {"base": base, "jobs": jobs}
    if values is not None:
        kwargs["values"] = tuple(values)
    if seeds is not None:
        kwargs["seeds"] = seeds
    return _RUNNERS[name](**kwargs)
