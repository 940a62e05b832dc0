"""Unstructured overlay construction and TTL-bounded query flooding.

Every peer is a servant: it issues queries and answers them. The overlay is
a ring backbone over the peer indices plus uniformly sampled chords, which
keeps the graph connected for any target degree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError

DEFAULT_TTL = 7

__all__ = [
    "DEFAULT_TTL",
    "QueryHit",
    "QueryMessage",
    "Topology",
    "build_overlay",
    "flood_reach",
]


@dataclass(frozen=True)
class QueryMessage:
    message_id: int
    origin: int
    keyword: str
    ttl_remaining: int

    def forwarded(self) -> "QueryMessage":
        if self.ttl_remaining <= 0:
            raise ValueError("cannot forward a message with no TTL left")
        return QueryMessage(self.message_id, self.origin, self.keyword, self.ttl_remaining - 1)


@dataclass(frozen=True)
class QueryHit:
    responder: int
    filename: str
    hop_distance: int
    spoofed: bool = False


@dataclass(eq=False)
class Topology:
    """Undirected overlay with sorted, symmetric adjacency lists."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    seed: int | None = None
    _reach_masks: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if len(self.adjacency) != self.n:
            raise ConfigError("adjacency length does not match n")
        for i, nbrs in enumerate(self.adjacency):
            if list(nbrs) != sorted(set(nbrs)):
                raise ConfigError(f"neighbors of {i} are not sorted and unique")
            for j in nbrs:
                if j == i:
                    raise ConfigError(f"self-loop at {i}")
                if not 0 <= j < self.n or i not in self.adjacency[j]:
                    raise ConfigError(f"edge ({i}, {j}) is not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges, seed: int | None = None) -> "Topology":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            a, b = int(a), int(b)
            if a == b:
                continue
            nbrs[a].add(b)
            nbrs[b].add(a)
        return cls(n, tuple(tuple(sorted(s)) for s in nbrs), seed)

    @classmethod
    def complete(cls, n: int) -> "Topology":
        return cls(n, tuple(tuple(j for j in range(n) if j != i) for i in range(n)))

    def neighbors(self, peer: int) -> tuple[int, ...]:
        return self.adjacency[peer]

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency])

    def mean_degree(self) -> float:
        return float(self.degrees().mean())

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, nbrs in enumerate(self.adjacency) for j in nbrs if i < j]

    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges())

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(flood_reach(self, 0, self.n)) == self.n - 1

    def to_edge_list(self) -> str:
        return "".join(f"{i} {j}\n" for i, j in self.edges())

    def write_edge_list(self, path) -> None:
        Path(path).write_text(self.to_edge_list())

    @classmethod
    def from_edge_list(cls, text: str, n: int | None = None) -> "Topology":
        edges = []
        for line in text.splitlines():
            line = line.strip()
            if line and not line.startswith("#"):
                a, b = line.split()
                edges.append((int(a), int(b)))
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        return cls.from_edges(n, edges)

    def reach_mask(self, origin: int, ttl: int) -> np.ndarray:
        """Boolean mask of peers a flood from ``origin`` reaches (origin excluded).

        Cached per (origin, ttl); the topology never changes after construction.
        """
        key = (origin, ttl)
        mask = self._reach_masks.get(key)
        if mask is None:
            mask = np.zeros(self.n, dtype=bool)
            peers = [p for p, _ in flood_reach(self, origin, ttl)]
            mask[peers] = True
            mask.flags.writeable = False
            self._reach_masks[key] = mask
        return mask


def _check_peer(topology: Topology, peer: int) -> None:
    if not 0 <= peer < topology.n:
        raise IndexError(f"peer {peer} outside [0, {topology.n})")


def build_overlay(n: int, avg_degree: float, seed: int) -> Topology:
    """Ring over ``0..n-1`` plus random chords up to the target mean degree.

    The edge count is ``round(n * avg_degree / 2)`` capped at the complete
    graph. Chords are sampled without replacement from the non-ring pairs, so
    the result is exact and a pure function of ``(n, avg_degree, seed)``.
    """
    if n < 2:
        raise ConfigError(f"overlay needs n >= 2, got {n}")
    if not 2 <= avg_degree < n and not (n == 2 and avg_degree == 2):
        raise ConfigError(f"avg_degree must satisfy 2 <= avg_degree < n, got {avg_degree} for n={n}")

    ring = {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)}
    max_edges = n * (n - 1) // 2
    target = min(max_edges, int(round(n * avg_degree / 2)))
    n_chords = max(0, target - len(ring))

    edges = sorted(ring)
    if n_chords:
        rows, cols = np.triu_indices(n, k=1)
        is_ring = (cols - rows == 1) | ((rows == 0) & (cols == n - 1))
        rows, cols = rows[~is_ring], cols[~is_ring]
        rng = np.random.default_rng(seed)
        pick = np.sort(rng.choice(rows.size, size=n_chords, replace=False))
        edges.extend(zip(rows[pick].tolist(), cols[pick].tolist()))
    return Topology.from_edges(n, edges, seed)


def flood_reach(topology: Topology, origin: int, ttl: int, online=None) -> set[tuple[int, int]]:
    """Peers a query flood reaches, with their minimal hop distance.

    Breadth-first with duplicate suppression: each peer handles a given
    message once. When ``online`` is given, offline peers neither receive
    nor forward the query.
    """
    _check_peer(topology, origin)
    if ttl < 0:
        raise ValueError(f"ttl must be >= 0, got {ttl}")
    seen = {origin}
    reached: set[tuple[int, int]] = set()
    frontier = deque([(origin, 0)])
    while frontier:
        peer, hops = frontier.popleft()
        if hops == ttl:
            continue
        for nb in topology.adjacency[peer]:
            if nb in seen or (online is not None and not online[nb]):
                continue
            seen.add(nb)
            reached.add((nb, hops + 1))
            frontier.append((nb, hops + 1))
    return reached
