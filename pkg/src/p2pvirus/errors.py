"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid scenario, topology or model configuration."""


class TransitionError(ValueError):
    """Illegal (state, event) pair for the peer health state machine."""

    def __init__(self, state, event):
        super().__init__(f"illegal transition: {event.value} from state {state.value}")
        self.state = state
        self.event = event


class NumericError(ArithmeticError):
    """ODE integration produced NaN, divergence or excessive drift."""

    def __init__(self, message: str, time: float):
        super().__init__(f"{message} at t={time:g}")
        self.time = time


class SimulationFinished(Exception):
    """Raised by ``step`` once no event remains before the horizon."""
