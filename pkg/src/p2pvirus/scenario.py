"""Scenario configuration and the ``key = value`` scenario file format."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .overlay import DEFAULT_TTL

__all__ = ["ScenarioConfig", "ScenarioParseError", "parse_scenario", "read_scenario", "serialize_scenario"]


@dataclass(frozen=True)
class ScenarioConfig:
    """Knobs of one simulation run.

    Rates are per unit of simulated time. ``churn_off`` is the rate at which
    an online peer leaves, ``churn_on`` the rate at which an offline peer
    returns; both 0 disables churn. ``decoy_share`` is the fraction of peers
    that initially share a legitimate file under each disguise name of the
    scenario virus, i.e. the genuine content the worm imitates.
    """

    n: int
    avg_degree: float = 6.0
    ttl: int = DEFAULT_TTL
    virus: str = "Swen"
    initial_infected: int = 1
    vulnerability: float = 1.0
    reinfection: bool = True
    query_rate: float = 1.0
    download_prob: float = 0.5
    exec_rate: float = 1.0
    recover_rate: float = 0.2
    churn_on: float = 0.0
    churn_off: float = 0.0
    horizon: float = 50.0
    sample_interval: float | None = None
    seed: int = 0
    keyword_mix: float = 0.5
    decoy_share: float = 1.0
    benign_files: int = 3
    copies_per_infection: int | None = None

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if self.ttl < 0:
            raise ConfigError(f"ttl must be >= 0, got {self.ttl}")
        if not 1 <= self.initial_infected <= self.n:
            raise ConfigError(f"initial_infected must lie in [1, n], got {self.initial_infected}")
        for name in ("vulnerability", "download_prob", "keyword_mix", "decoy_share"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        for name in ("query_rate", "exec_rate", "recover_rate", "churn_on", "churn_off"):
            value = getattr(self, name)
            if not (value >= 0 and math.isfinite(value)):
                raise ConfigError(f"{name} must be a finite rate >= 0, got {value}")
        if not self.horizon > 0:
            raise ConfigError(f"horizon must be > 0, got {self.horizon}")
        if self.sample_interval is not None and not 0 < self.sample_interval <= self.horizon:
            raise ConfigError(f"sample_interval must lie in (0, horizon], got {self.sample_interval}")
        if self.benign_files < 0:
            raise ConfigError("benign_files must be >= 0")
        if self.copies_per_infection is not None and self.copies_per_infection < 1:
            raise ConfigError("copies_per_infection must be >= 1")
        if self.churn_off > 0 and self.churn_on == 0:
            raise ConfigError("churn_off > 0 needs churn_on > 0, or peers never return")

    @property
    def interval(self) -> float:
        return self.sample_interval if self.sample_interval is not None else self.horizon / 100

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_overrides(self, overrides: dict[str, str]) -> "ScenarioConfig":
        """Apply textual ``key=value`` overrides, as from ``--set``."""
        changes = {}
        for key, text in overrides.items():
            if key not in _FIELDS:
                raise ConfigError(f"unknown key {key!r}")
            changes[key] = _convert(key, text)
        return self.replace(**changes)


_FIELDS = {f.name: f for f in dataclasses.fields(ScenarioConfig)}
_INT_KEYS = {"n", "ttl", "initial_infected", "seed", "benign_files", "copies_per_infection"}
_BOOL_KEYS = {"reinfection"}
_STR_KEYS = {"virus"}
_OPTIONAL_KEYS = {"sample_interval", "copies_per_infection"}


class ScenarioParseError(ConfigError):
    def __init__(self, message: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line


def _convert(key: str, text: str):
    text = text.strip()
    if key in _OPTIONAL_KEYS and text.lower() in ("", "none", "default"):
        return None
    try:
        if key in _STR_KEYS:
            return text
        if key in _BOOL_KEYS:
            word = text.lower()
            if word in ("true", "yes", "on", "1"):
                return True
            if word in ("false", "no", "off", "0"):
                return False
            raise ValueError(text)
        if key in _INT_KEYS:
            return int(text)
        return float(text)
    except ValueError:
        raise ConfigError(f"bad value for {key}: {text!r}") from None


def parse_scenario(text: str) -> ScenarioConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep:
            raise ScenarioParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if key not in _FIELDS:
            raise ScenarioParseError(f"unknown key {key!r}", lineno)
        if key in values:
            raise ScenarioParseError(f"duplicate key {key!r}", lineno)
        try:
            values[key] = _convert(key, value)
        except ConfigError as exc:
            raise ScenarioParseError(str(exc), lineno) from None
    missing = [name for name, f in _FIELDS.items()
               if f.default is dataclasses.MISSING and name not in values]
    if missing:
        raise ScenarioParseError(f"missing required key {missing[0]!r}")
    return ScenarioConfig(**values)


def read_scenario(path) -> ScenarioConfig:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def serialize_scenario(config: ScenarioConfig) -> str:
    lines = []
    for name in _FIELDS:
        value = getattr(config, name)
        if value is None:
            text = "none"
        elif isinstance(value, bool):
            text = "true" if value else "false"
        else:
            text = repr(value) if isinstance(value, float) else str(value)
        lines.append(f"{name} = {text}")
    return "\n".join(lines) + "\n"
