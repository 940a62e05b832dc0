"""Virus propagation in unstructured Gnutella-style P2P file sharing."""

from .epidemic import (
    EpidemicParams,
    HealthEvent,
    HealthState,
    OdeModel,
    OdeState,
    integrate_ode,
    ode_derivative,
    transition,
)
from .errors import ConfigError, NumericError, SimulationFinished, TransitionError
from .malware import (
    OrdinalLevel,
    SecurityScoreVector,
    VirusProfile,
    builtin_catalog,
    compare_catalog,
    plant_copies,
    score_profile,
    spoof_hit,
)
from .metrics import MetricsSeries, SweepResult, aggregate_sweep, export_csv, parse_csv
from .overlay import Topology, build_overlay, flood_reach
from .scenario import ScenarioConfig, parse_scenario, serialize_scenario
from .simcore import effective_beta, init_scenario, run, simulate, step

__version__ = "0.1.0"
