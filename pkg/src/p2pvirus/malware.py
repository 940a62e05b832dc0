"""Catalog of P2P malware profiles, ordinal security scoring, and the two
P2P propagation behaviours: shared-folder replication and query-hit spoofing.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from typing import NamedTuple

import numpy as np

from .errors import ConfigError

__all__ = [
    "IntRange",
    "OrdinalLevel",
    "SecurityScoreVector",
    "SharedFile",
    "VirusProfile",
    "builtin_catalog",
    "compare_catalog",
    "find_profile",
    "parse_catalog",
    "plant_copies",
    "score_profile",
    "serialize_catalog",
    "spoof_hit",
]


class OrdinalLevel(enum.IntEnum):
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @classmethod
    def parse(cls, text: str) -> "OrdinalLevel | None":
        word = text.strip().lower()
        if word in ("", "unknown"):
            return None
        try:
            return _LEVEL_WORDS[word]
        except KeyError:
            raise ConfigError(f"unknown ordinal level {text!r}") from None

    def label(self, ease_scale: bool = False) -> str:
        if ease_scale:
            return ("Easy", "Moderate", "Difficult")[self - 1]
        return self.name.capitalize()


_LEVEL_WORDS = {
    "low": OrdinalLevel.LOW,
    "medium": OrdinalLevel.MEDIUM,
    "high": OrdinalLevel.HIGH,
    "easy": OrdinalLevel.LOW,
    "moderate": OrdinalLevel.MEDIUM,
    "difficult": OrdinalLevel.HIGH,
}


@dataclass(frozen=True)
class IntRange:
    """Closed integer range; ``upper=None`` means unbounded ("above N")."""

    lower: int
    upper: int | None = None

    def __post_init__(self):
        if self.lower < 0 or (self.upper is not None and self.upper < self.lower):
            raise ConfigError(f"invalid range {self.lower}..{self.upper}")

    def __str__(self):
        if self.upper is None:
            return f"above {self.lower}"
        return f"{self.lower} - {self.upper}"

    @classmethod
    def parse(cls, text: str) -> "IntRange | None":
        text = text.strip().lower()
        if text in ("", "unknown"):
            return None
        if text.startswith("above"):
            return cls(int(text[len("above"):]))
        lo, sep, hi = text.partition("-")
        if not sep:
            raise ConfigError(f"cannot parse range {text!r}")
        return cls(int(lo), int(hi))


@dataclass(frozen=True)
class SharedFile:
    name: str
    infected: bool = False
    profile: str | None = None


@dataclass(frozen=True)
class VirusProfile:
    name: str
    aliases: tuple[str, ...] = ()
    kind: str = "Wild worm"
    untamed_level: OrdinalLevel | None = None
    infection_nodes: IntRange | None = None
    site_count: IntRange | None = None
    geo_distribution: OrdinalLevel | None = None
    threat_restraint: OrdinalLevel | None = None
    removal: OrdinalLevel | None = None
    damage_intensity: OrdinalLevel | None = None
    distribution_intensity: OrdinalLevel | None = None
    author: str | None = None
    disguise_filenames: tuple[str, ...] = ()
    copies_per_infection: int = 5
    spoofs_query_hits: bool = False
    disguise_source: str = "placeholder"

    def __post_init__(self):
        if not self.name:
            raise ConfigError("profile needs a name")
        if self.copies_per_infection < 1:
            raise ConfigError(f"{self.name}: copies_per_infection must be >= 1")
        if not self.disguise_filenames:
            raise ConfigError(f"{self.name}: disguise_filenames must be nonempty")
        if len(set(self.disguise_filenames)) != len(self.disguise_filenames):
            raise ConfigError(f"{self.name}: duplicate disguise filenames")


class SecurityScoreVector(NamedTuple):
    """Eight ordinal scores in {0, 1, 2, 3}; 0 means not reported."""

    damage: int
    distribution: int
    removal_difficulty: int
    threat_containment: int
    geographical_distribution: int
    source_sites: int
    infections: int
    wild_level: int


SCORE_COLUMNS = SecurityScoreVector._fields


def _level(value: OrdinalLevel | None) -> int:
    return 0 if value is None else int(value)


def _bucket(value: IntRange | None, edges: tuple[int, int]) -> int:
    if value is None:
        return 0
    if value.lower >= edges[1]:
        return 3
    if value.lower >= edges[0]:
        return 2
    return 1


def score_profile(profile: VirusProfile) -> SecurityScoreVector:
    return SecurityScoreVector(
        damage=_level(profile.damage_intensity),
        distribution=_level(profile.distribution_intensity),
        removal_difficulty=_level(profile.removal),
        threat_containment=_level(profile.threat_restraint),
        geographical_distribution=_level(profile.geo_distribution),
        source_sites=_bucket(profile.site_count, (3, 10)),
        infections=_bucket(profile.infection_nodes, (50, 1000)),
        wild_level=_level(profile.untamed_level),
    )


@dataclass(frozen=True)
class ComparisonMatrix:
    names: tuple[str, ...]
    scores: np.ndarray = field(repr=False)  # shape (len(names), 8)
    columns: tuple[str, ...] = SCORE_COLUMNS

    @property
    def shape(self):
        return self.scores.shape


def compare_catalog(profiles) -> ComparisonMatrix:
    profiles = list(profiles)
    if not profiles:
        raise ConfigError("compare_catalog needs at least one profile")
    scores = np.array([score_profile(p) for p in profiles], dtype=int)
    return ComparisonMatrix(tuple(p.name for p in profiles), scores)


def _suffixed(name: str, k: int) -> str:
    stem, ext = os.path.splitext(name)
    return f"{stem} ({k}){ext}"


def plant_copies(folder: list, profile: VirusProfile, rng) -> list:
    """Append ``copies_per_infection`` infected copies to ``folder``.

    Names come from the disguise list without replacement; when more copies
    are needed than names exist, later rounds reuse the list with a numeric
    suffix. ``rng`` is a ``random.Random``.
    """
    names = list(profile.disguise_filenames)
    order = rng.sample(names, len(names))
    for k in range(profile.copies_per_infection):
        base = order[k % len(order)]
        rnd = k // len(order)
        name = base if rnd == 0 else _suffixed(base, rnd + 1)
        folder.append(SharedFile(name, True, profile.name))
    return folder


def spoof_hit(profile: VirusProfile, keyword: str) -> str:
    """Fake result name a query-spoofing worm returns for ``keyword``."""
    if not profile.spoofs_query_hits:
        raise ValueError(f"{profile.name} does not spoof query hits")
    if not keyword:
        raise ValueError("keyword must be nonempty")
    stem, _ = os.path.splitext(keyword)
    return f"{stem or keyword}.exe"


# --- catalog text format -------------------------------------------------

_LIST_SEP = " | "
_LEVEL_FIELDS = ("untamed_level", "geo_distribution", "damage_intensity", "distribution_intensity")
_EASE_FIELDS = ("threat_restraint", "removal")
_RANGE_FIELDS = ("infection_nodes", "site_count")
_FIELD_NAMES = tuple(f.name for f in fields(VirusProfile))


def _format_value(name: str, value) -> str:
    if name in ("aliases", "disguise_filenames"):
        return _LIST_SEP.join(value)
    if name in _LEVEL_FIELDS or name in _EASE_FIELDS:
        return "unknown" if value is None else value.label(name in _EASE_FIELDS)
    if name == "spoofs_query_hits":
        return "yes" if value else "no"
    return "unknown" if value is None else str(value)


def _parse_value(name: str, text: str):
    if name in ("aliases", "disguise_filenames"):
        return tuple(part.strip() for part in text.split("|") if part.strip())
    if name in _LEVEL_FIELDS or name in _EASE_FIELDS:
        return OrdinalLevel.parse(text)
    if name in _RANGE_FIELDS:
        return IntRange.parse(text)
    if name == "copies_per_infection":
        return int(text)
    if name == "spoofs_query_hits":
        if text.lower() not in ("yes", "no", "true", "false"):
            raise ConfigError(f"expected yes/no, got {text!r}")
        return text.lower() in ("yes", "true")
    if name == "author":
        return None if text.lower() in ("", "unknown") else text
    return text


def serialize_catalog(profiles) -> str:
    blocks = []
    for p in profiles:
        lines = []
        for name in _FIELD_NAMES:
            value = _format_value(name, getattr(p, name))
            lines.append(f"{name}: {value}".rstrip())
        blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)


def parse_catalog(text: str) -> list[VirusProfile]:
    profiles = []
    current: dict = {}
    start = 0

    def flush():
        if current:
            try:
                profiles.append(VirusProfile(**current))
            except TypeError as exc:
                raise ConfigError(f"profile starting at line {start}: {exc}") from None
            current.clear()

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            flush()
            continue
        if line.startswith("#"):
            continue
        key, sep, value = line.partition(":")
        key = key.strip()
        if not sep or key not in _FIELD_NAMES:
            raise ConfigError(f"line {lineno}: unknown field {key!r}")
        if key == "name":
            flush()
            start = lineno
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate field {key!r}")
        current[key] = _parse_value(key, value.strip())
    flush()

    names = [p.name for p in profiles]
    if len(set(names)) != len(names):
        raise ConfigError("profile names must be unique within a catalog")
    return profiles


def builtin_catalog() -> list[VirusProfile]:
    return parse_catalog(builtin_catalog_text())


def builtin_catalog_text() -> str:
    return resources.files("p2pvirus").joinpath("data/catalog.txt").read_text(encoding="utf-8")


def find_profile(catalog, name: str) -> VirusProfile:
    for p in catalog:
        if p.name == name:
            return p
    raise KeyError(name)


def with_copies(profile: VirusProfile, copies: int | None) -> VirusProfile:
    return profile if copies is None else replace(profile, copies_per_infection=copies)
