"""Discrete-event simulation of a worm spreading through Gnutella-style
file sharing.

Peers query at exponential intervals, flood the query through the overlay,
and download one returned hit. Downloading an infected file exposes a
vulnerable susceptible peer; executing it infects the peer, which plants
disguised copies of the worm in its shared folder. Recovery cleans the
folder and returns the peer to Susceptible or Removed.

Every random draw comes from a stream derived from the master seed: one
stream for initialisation and one behaviour stream plus one churn stream
per peer, so a run is a pure function of its configuration.
"""

from __future__ import annotations

import enum
import heapq
import random
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .epidemic import EpidemicParams, HealthEvent, HealthState, transition
from .errors import ConfigError, SimulationFinished
from .malware import SharedFile, VirusProfile, builtin_catalog, find_profile, plant_copies, spoof_hit, with_copies
from .metrics import MetricsSeries
from .overlay import Topology, build_overlay, flood_reach
from .scenario import ScenarioConfig

__all__ = [
    "BENIGN_FILENAMES",
    "EventKind",
    "Peer",
    "SimEvent",
    "SimState",
    "effective_beta",
    "init_scenario",
    "run",
    "step",
]

BENIGN_FILENAMES = tuple(
    f"{stem}.{ext}"
    for stem, ext in [
        ("summer_hits", "mp3"), ("road_trip", "mp3"), ("live_concert", "mp3"), ("acoustic_set", "mp3"),
        ("dance_mix", "mp3"), ("jazz_classics", "mp3"), ("piano_sonata", "mp3"), ("rock_anthems", "mp3"),
        ("holiday_video", "avi"), ("nature_doc", "avi"), ("cartoon_ep1", "avi"), ("cartoon_ep2", "avi"),
        ("lecture_01", "avi"), ("cooking_show", "avi"), ("short_film", "mpg"), ("music_video", "mpg"),
        ("linux_howto", "pdf"), ("recipes", "pdf"), ("travel_guide", "pdf"), ("poetry", "txt"),
        ("ebook_novel", "pdf"), ("thesis_draft", "doc"), ("budget", "xls"), ("cv_template", "doc"),
        ("wallpapers", "zip"), ("fonts_pack", "zip"), ("icons", "zip"), ("photos_2003", "zip"),
        ("beach", "jpg"), ("mountains", "jpg"), ("sunset", "jpg"), ("city_night", "jpg"),
        ("podcast_12", "mp3"), ("audiobook_ch1", "mp3"), ("radio_show", "mp3"), ("ringtones", "zip"),
        ("game_save", "zip"), ("map_pack", "zip"), ("subtitles", "srt"), ("karaoke", "mp3"),
    ]
)


class EventKind(enum.IntEnum):
    ISSUE_QUERY = 0
    COMPLETE_DOWNLOAD = 1
    EXECUTE_FILE = 2
    RECOVER = 3
    GO_OFFLINE = 4
    GO_ONLINE = 5


@dataclass(frozen=True)
class SimEvent:
    time: float
    seq: int
    kind: EventKind
    subject: int
    payload: object = None

    def sort_key(self):
        return (self.time, self.seq)


@dataclass
class Peer:
    id: int
    health: HealthState = HealthState.SUSCEPTIBLE
    folder: list = field(default_factory=list)
    online: bool = True
    vulnerable: bool = True

    def infected_files(self) -> list[SharedFile]:
        return [f for f in self.folder if f.infected]


_COUNTS = {
    HealthState.SUSCEPTIBLE: 0,
    HealthState.EXPOSED: 1,
    HealthState.INFECTED: 2,
    HealthState.REMOVED: 3,
}


class SimState:
    """Mutable state of one run: peers, event queue, file index, counters.

    The file index mirrors peer folders as one boolean vector per
    (filename, infected) pair, so answering a flooded query costs a few
    vector operations instead of a scan over every folder.
    """

    def __init__(self, config: ScenarioConfig, profile: VirusProfile, topology: Topology):
        self.config = config
        self.profile = profile
        self.topology = topology
        self.params = EpidemicParams(
            beta=0.0, sigma=config.exec_rate, delta=config.recover_rate,
            reinfection=config.reinfection, vulnerability=config.vulnerability,
        )
        n = config.n
        self.peers = [Peer(i) for i in range(n)]
        self.now = 0.0
        self.queue: list = []
        self._seq = 0
        self.counts = [n, 0, 0, 0]
        self.online_count = n
        self.online = np.ones(n, dtype=bool)
        self.all_online = True
        self.spoofers = np.zeros(n, dtype=bool)
        self.downloads = 0
        self.scan_hits = 0
        self.infections = 0
        self.exposures = 0
        self.si_integral = 0.0
        self._legit: dict[str, np.ndarray] = {}
        self._infected: dict[str, np.ndarray] = {}
        self._held = [Counter() for _ in range(n)]
        self.behavior = [random.Random(f"{config.seed}:behavior:{i}") for i in range(n)]
        self.churn = [random.Random(f"{config.seed}:churn:{i}") for i in range(n)]
        self.samples: list[tuple] = []
        self._interval = config.interval
        self._n_samples = int(np.floor(config.horizon / self._interval + 1e-9)) + 1

    # -- bookkeeping ---------------------------------------------------

    def schedule(self, time: float, kind: EventKind, subject: int, payload=None) -> SimEvent:
        event = SimEvent(time, self._seq, kind, subject, payload)
        self._seq += 1
        heapq.heappush(self.queue, (time, event.seq, event))
        return event

    def set_health(self, peer: Peer, health: HealthState) -> None:
        self.counts[_COUNTS[peer.health]] -= 1
        self.counts[_COUNTS[health]] += 1
        peer.health = health

    def _index(self, name: str, infected: bool) -> np.ndarray:
        table = self._infected if infected else self._legit
        vec = table.get(name)
        if vec is None:
            vec = table[name] = np.zeros(self.config.n, dtype=bool)
        return vec

    def add_file(self, peer: Peer, f: SharedFile) -> None:
        key = (f.name, f.infected)
        peer.folder.append(f)
        self._held[peer.id][key] += 1
        self._index(*key)[peer.id] = True

    def holds(self, peer: Peer, f: SharedFile) -> bool:
        return self._held[peer.id][f.name, f.infected] > 0

    def clean_folder(self, peer: Peer) -> None:
        held = self._held[peer.id]
        for f in peer.infected_files():
            key = (f.name, True)
            held[key] -= 1
            if held[key] == 0:
                del held[key]
                self._infected[f.name][peer.id] = False
        peer.folder = [f for f in peer.folder if not f.infected]

    def infect(self, peer: Peer, rng) -> None:
        for f in plant_copies([], self.profile, rng):
            self.add_file(peer, f)
        if self.profile.spoofs_query_hits:
            self.spoofers[peer.id] = True

    def cure(self, peer: Peer) -> None:
        """Recovery: leave Infected and drop every infected file."""
        self.set_health(peer, transition(peer.health, HealthEvent.RECOVER, self.params))
        self.clean_folder(peer)
        self.spoofers[peer.id] = False

    def set_online(self, peer: Peer, online: bool) -> None:
        if peer.online != online:
            peer.online = online
            self.online[peer.id] = online
            self.online_count += 1 if online else -1
            self.all_online = self.online_count == self.config.n

    def _advance(self, time: float) -> None:
        self._record_until(time, inclusive=False)
        self.si_integral += self.counts[0] * self.counts[2] * (time - self.now)
        self.now = time

    def _record_until(self, time: float, inclusive: bool) -> None:
        while len(self.samples) < self._n_samples:
            t = len(self.samples) * self._interval
            if t > time or (t == time and not inclusive):
                break
            self.samples.append((t, *self.counts, self.online_count, self.downloads, self.scan_hits, self.infections))

    def finish(self) -> None:
        horizon = self.config.horizon
        if self.now < horizon:
            self._advance(horizon)
        self._record_until(horizon, inclusive=True)

    def series(self) -> MetricsSeries:
        return MetricsSeries.from_rows(self.config.n, self.samples, config=self.config, seed=self.config.seed)

    # -- queries ---------------------------------------------------------

    def responders(self, origin: int) -> np.ndarray:
        ttl = self.config.ttl
        if self.all_online:
            return self.topology.reach_mask(origin, ttl)
        mask = np.zeros(self.config.n, dtype=bool)
        reached = [p for p, _ in flood_reach(self.topology, origin, ttl, online=self.online)]
        mask[reached] = True
        return mask

    def query_hits(self, origin: int, keyword: str) -> tuple[int, int, int]:
        """(legit, infected, spoofed) hit counts for a flooded query.

        A servant answers once per filename it shares. When it holds both a
        legitimate and an infected file under that name, the worm's copy
        shadows the legitimate one. An infected spoofing servant adds one
        fake hit.
        """
        resp = self.responders(origin)
        legit = self._legit.get(keyword)
        infected = self._infected.get(keyword)
        n_inf = 0
        if infected is not None:
            n_inf = int(np.count_nonzero(infected & resp))
            if legit is not None:
                legit = legit & ~infected
        n_legit = int(np.count_nonzero(legit & resp)) if legit is not None else 0
        n_spoof = int(np.count_nonzero(self.spoofers & resp)) if self.profile.spoofs_query_hits else 0
        return n_legit, n_inf, n_spoof

    # -- convenience -------------------------------------------------------

    def state_counts(self) -> dict[str, int]:
        return dict(zip(("susceptible", "exposed", "infected", "removed"), self.counts))

    def counters(self) -> dict[str, int]:
        return {"downloads": self.downloads, "scan_hits": self.scan_hits, "infections": self.infections}


def _round_half_up(x: float) -> int:
    return int(np.floor(x + 0.5))


def _derive_seed(seed: int, stream: int) -> int:
    return int(np.random.SeedSequence([seed, stream]).generate_state(1)[0])


def init_scenario(config: ScenarioConfig, catalog=None, topology: Topology | None = None) -> SimState:
    """Build the initial state for ``config``.

    ``topology`` overrides the generated overlay (it must have ``config.n``
    peers).
    """
    catalog = builtin_catalog() if catalog is None else catalog
    try:
        profile = find_profile(catalog, config.virus)
    except KeyError:
        raise ConfigError(f"virus {config.virus!r} not in catalog") from None
    profile = with_copies(profile, config.copies_per_infection)
    n = config.n

    if topology is None:
        topology = build_overlay(n, config.avg_degree, _derive_seed(config.seed, 1))
    elif topology.n != n:
        raise ConfigError(f"topology has {topology.n} peers, config expects {n}")

    state = SimState(config, profile, topology)
    rng = random.Random(f"{config.seed}:init")

    n_vulnerable = _round_half_up(config.vulnerability * n)
    if config.initial_infected > n_vulnerable:
        raise ConfigError(
            f"initial_infected={config.initial_infected} exceeds the {n_vulnerable} vulnerable peers"
        )
    vulnerable = set(rng.sample(range(n), n_vulnerable))
    for peer in state.peers:
        peer.vulnerable = peer.id in vulnerable
        for name in rng.sample(BENIGN_FILENAMES, min(config.benign_files, len(BENIGN_FILENAMES))):
            state.add_file(peer, SharedFile(name))
        for name in profile.disguise_filenames:
            if rng.random() < config.decoy_share:
                state.add_file(peer, SharedFile(name))

    for pid in rng.sample(sorted(vulnerable), config.initial_infected):
        peer = state.peers[pid]
        state.set_health(peer, HealthState.INFECTED)
        state.infect(peer, rng)
        if config.recover_rate > 0:
            state.schedule(state.behavior[pid].expovariate(config.recover_rate), EventKind.RECOVER, pid)

    for peer in state.peers:
        if config.query_rate > 0:
            state.schedule(state.behavior[peer.id].expovariate(config.query_rate), EventKind.ISSUE_QUERY, peer.id)
        if config.churn_off > 0:
            state.schedule(state.churn[peer.id].expovariate(config.churn_off), EventKind.GO_OFFLINE, peer.id)
    return state


# -- event handlers -------------------------------------------------------


def _issue_query(state: SimState, peer: Peer, event: SimEvent) -> None:
    cfg = state.config
    rng = state.behavior[peer.id]
    state.schedule(event.time + rng.expovariate(cfg.query_rate), EventKind.ISSUE_QUERY, peer.id)
    if not peer.online:
        return
    if rng.random() < cfg.keyword_mix:
        keyword = rng.choice(state.profile.disguise_filenames)
    else:
        keyword = rng.choice(BENIGN_FILENAMES)
    n_legit, n_inf, n_spoof = state.query_hits(peer.id, keyword)
    if n_inf + n_spoof > 0:
        state.scan_hits += 1
    total = n_legit + n_inf + n_spoof
    if total == 0 or rng.random() >= cfg.download_prob:
        return
    pick = rng.randrange(total)
    if pick < n_legit:
        f = SharedFile(keyword)
    elif pick < n_legit + n_inf:
        f = SharedFile(keyword, True, state.profile.name)
    else:
        f = SharedFile(spoof_hit(state.profile, keyword), True, state.profile.name)
    state.schedule(event.time, EventKind.COMPLETE_DOWNLOAD, peer.id, f)


def _complete_download(state: SimState, peer: Peer, event: SimEvent) -> None:
    f = event.payload
    state.downloads += 1
    if not state.holds(peer, f):
        state.add_file(peer, f)
    if f.infected and peer.vulnerable and peer.health is HealthState.SUSCEPTIBLE:
        state.set_health(peer, transition(peer.health, HealthEvent.DOWNLOAD_INFECTED, state.params))
        state.exposures += 1
        if state.config.exec_rate > 0:
            delay = state.behavior[peer.id].expovariate(state.config.exec_rate)
            state.schedule(event.time + delay, EventKind.EXECUTE_FILE, peer.id)


def _execute_file(state: SimState, peer: Peer, event: SimEvent) -> None:
    if peer.health is not HealthState.EXPOSED:
        return
    rng = state.behavior[peer.id]
    if not peer.online:
        state.schedule(event.time + rng.expovariate(state.config.exec_rate), EventKind.EXECUTE_FILE, peer.id)
        return
    state.set_health(peer, transition(peer.health, HealthEvent.EXECUTE, state.params))
    state.infect(peer, rng)
    state.infections += 1
    if state.config.recover_rate > 0:
        state.schedule(event.time + rng.expovariate(state.config.recover_rate), EventKind.RECOVER, peer.id)


def _recover(state: SimState, peer: Peer, event: SimEvent) -> None:
    if peer.health is HealthState.INFECTED:
        state.cure(peer)


def _go_offline(state: SimState, peer: Peer, event: SimEvent) -> None:
    state.set_online(peer, False)
    if state.config.churn_on > 0:
        delay = state.churn[peer.id].expovariate(state.config.churn_on)
        state.schedule(event.time + delay, EventKind.GO_ONLINE, peer.id)


def _go_online(state: SimState, peer: Peer, event: SimEvent) -> None:
    state.set_online(peer, True)
    if state.config.churn_off > 0:
        delay = state.churn[peer.id].expovariate(state.config.churn_off)
        state.schedule(event.time + delay, EventKind.GO_OFFLINE, peer.id)


_HANDLERS = {
    EventKind.ISSUE_QUERY: _issue_query,
    EventKind.COMPLETE_DOWNLOAD: _complete_download,
    EventKind.EXECUTE_FILE: _execute_file,
    EventKind.RECOVER: _recover,
    EventKind.GO_OFFLINE: _go_offline,
    EventKind.GO_ONLINE: _go_online,
}


def step(state: SimState) -> SimEvent:
    """Process the next event. Raises SimulationFinished (after recording
    the remaining samples) once nothing is left before the horizon."""
    if not state.queue or state.queue[0][0] > state.config.horizon:
        state.finish()
        raise SimulationFinished(state.now)
    time, _, event = heapq.heappop(state.queue)
    if not 0 <= event.subject < state.config.n:
        raise RuntimeError(f"internal error: event {event} references an unknown peer")
    state._advance(time)
    _HANDLERS[event.kind](state, state.peers[event.subject], event)
    return event


def run(state: SimState) -> MetricsSeries:
    while True:
        try:
            step(state)
        except SimulationFinished:
            return state.series()


def simulate(config: ScenarioConfig, catalog=None, topology: Topology | None = None) -> MetricsSeries:
    """``init_scenario`` followed by ``run``."""
    return run(init_scenario(config, catalog, topology))


def effective_beta(states) -> float:
    """Mass-action infection rate fitted to one or more finished runs.

    Pooled maximum-likelihood estimate ``n * exposures / integral(S*I dt)``.
    It equals ``query_rate * keyword_mix * download_prob * p`` where ``p``
    is the observed chance a download is infected, per unit infected
    fraction.
    """
    states = list(states)
    exposures = sum(s.exposures for s in states)
    integral = sum(s.si_integral / s.config.n for s in states)
    if integral <= 0:
        return 0.0
    return exposures / integral


def infected_hit_probability(states) -> float:
    """``p`` in the rate mapping above."""
    cfg = states[0].config
    contact = cfg.query_rate * cfg.keyword_mix * cfg.download_prob
    return effective_beta(states) / contact if contact > 0 else 0.0
