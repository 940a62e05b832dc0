"""Peer health state machine and mean-field compartment models."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NumericError, TransitionError

__all__ = [
    "EpidemicParams",
    "HealthEvent",
    "HealthState",
    "OdeModel",
    "OdeState",
    "OdeTrajectory",
    "integrate_ode",
    "ode_derivative",
    "sis_logistic",
    "transition",
]


class HealthState(enum.Enum):
    SUSCEPTIBLE = "S"
    EXPOSED = "E"
    INFECTED = "I"
    REMOVED = "R"


class HealthEvent(enum.Enum):
    DOWNLOAD_INFECTED = "download_infected"
    EXECUTE = "execute"
    DELETE_BEFORE_EXECUTE = "delete_before_execute"
    RECOVER = "recover"


class OdeModel(str, enum.Enum):
    SIS = "SIS"
    SIR = "SIR"
    SEIR = "SEIR"
    SEIS = "SEIS"


@dataclass(frozen=True)
class EpidemicParams:
    beta: float
    sigma: float = 1.0
    delta: float = 0.0
    reinfection: bool = True
    vulnerability: float = 1.0

    def __post_init__(self):
        for name in ("beta", "sigma", "delta"):
            value = getattr(self, name)
            if not value >= 0:
                raise ConfigError(f"{name} must be >= 0, got {value}")
        if not 0.0 <= self.vulnerability <= 1.0:
            raise ConfigError(f"vulnerability must lie in [0, 1], got {self.vulnerability}")


@dataclass(frozen=True)
class OdeState:
    """Population fractions; ``as_array`` order is (s, e, i, r)."""

    s: float = 1.0
    e: float = 0.0
    i: float = 0.0
    r: float = 0.0

    def __post_init__(self):
        parts = self.as_array()
        if np.any(parts < 0) or np.any(parts > 1):
            raise ConfigError(f"fractions must lie in [0, 1]: {self}")
        if abs(parts.sum() - 1.0) > 1e-9:
            raise ConfigError(f"fractions must sum to 1, got {parts.sum()!r}")

    @classmethod
    def from_infected(cls, i0: float, e0: float = 0.0, r0: float = 0.0) -> "OdeState":
        return cls(s=1.0 - i0 - e0 - r0, e=e0, i=i0, r=r0)

    def as_array(self) -> np.ndarray:
        return np.array([self.s, self.e, self.i, self.r], dtype=float)


_TRANSITIONS = {
    (HealthState.SUSCEPTIBLE, HealthEvent.DOWNLOAD_INFECTED): HealthState.EXPOSED,
    (HealthState.EXPOSED, HealthEvent.EXECUTE): HealthState.INFECTED,
    (HealthState.EXPOSED, HealthEvent.DELETE_BEFORE_EXECUTE): HealthState.SUSCEPTIBLE,
}


def transition(state: HealthState, event: HealthEvent, params: EpidemicParams | None = None) -> HealthState:
    """Successor health state; recovery depends on ``params.reinfection``."""
    if state is HealthState.INFECTED and event is HealthEvent.RECOVER:
        reinfection = True if params is None else params.reinfection
        return HealthState.SUSCEPTIBLE if reinfection else HealthState.REMOVED
    try:
        return _TRANSITIONS[state, event]
    except KeyError:
        raise TransitionError(state, event) from None


def ode_derivative(x, params: EpidemicParams, model: OdeModel | str) -> np.ndarray:
    """Mass-action time derivative of (s, e, i, r).

    ``x`` is an OdeState or a length-4 array. Vulnerability scales the
    susceptible pool that infection can draw from.
    """
    model = OdeModel(model)
    s, e, i, r = x.as_array() if isinstance(x, OdeState) else x
    force = params.beta * params.vulnerability * s * i
    recovered = params.delta * i
    if model is OdeModel.SIS:
        return np.array([recovered - force, 0.0, force - recovered, 0.0])
    if model is OdeModel.SIR:
        return np.array([-force, 0.0, force - recovered, recovered])
    onset = params.sigma * e
    if model is OdeModel.SEIR:
        return np.array([-force, force - onset, onset - recovered, recovered])
    return np.array([recovered - force, force - onset, onset - recovered, 0.0])


@dataclass(frozen=True)
class OdeTrajectory:
    times: np.ndarray
    states: np.ndarray  # shape (len(times), 4): s, e, i, r
    model: OdeModel

    @property
    def s(self):
        return self.states[:, 0]

    @property
    def e(self):
        return self.states[:, 1]

    @property
    def i(self):
        return self.states[:, 2]

    @property
    def r(self):
        return self.states[:, 3]

    def at(self, t: float) -> np.ndarray:
        """Linear interpolation of the state at time ``t``."""
        return np.array([np.interp(t, self.times, self.states[:, k]) for k in range(4)])


def integrate_ode(x0, params: EpidemicParams, model: OdeModel | str, horizon: float, dt: float) -> OdeTrajectory:
    """Fixed-step classical RK4, sampled at every step from 0 to ``horizon``."""
    model = OdeModel(model)
    if not dt > 0:
        raise ConfigError(f"dt must be > 0, got {dt}")
    if not horizon >= dt:
        raise ConfigError(f"horizon must be >= dt, got horizon={horizon}, dt={dt}")
    steps = int(round(horizon / dt))
    x = x0.as_array() if isinstance(x0, OdeState) else np.asarray(x0, dtype=float)
    out = np.empty((steps + 1, 4))
    out[0] = x
    times = np.arange(steps + 1) * dt

    def f(y):
        return ode_derivative(y, params, model)

    for k in range(steps):
        k1 = f(x)
        k2 = f(x + 0.5 * dt * k1)
        k3 = f(x + 0.5 * dt * k2)
        k4 = f(x + dt * k3)
        x = x + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = times[k + 1]
        if not np.all(np.isfinite(x)):
            raise NumericError("non-finite state", t)
        total = x.sum()
        if abs(total - 1.0) > 1e-9 or x.min() < -1e-9:
            raise NumericError(f"state left the simplex (sum={total!r}, min={x.min()!r})", t)
        x = np.clip(x, 0.0, None)
        x = x / x.sum()
        out[k + 1] = x
    return OdeTrajectory(times, out, model)


def sis_logistic(t, i0: float, beta: float, delta: float):
    """Closed-form infected fraction of the SIS model (beta != delta)."""
    growth = beta - delta
    i_star = 1.0 - delta / beta
    return i_star / (1.0 + (i_star / i0 - 1.0) * np.exp(-growth * np.asarray(t, dtype=float)))
