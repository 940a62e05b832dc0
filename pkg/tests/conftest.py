import random

import pytest

from p2pvirus.overlay import Topology

ACCEPTANCE_LINES: list[str] = []


def line_graph(n: int) -> Topology:
    return Topology.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def random_graph(n: int, seed: int) -> Topology:
    """Arbitrary (possibly disconnected) simple graph, for oracle checks."""
    rng = random.Random(seed)
    p = rng.uniform(0.1, 0.8)
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p]
    return Topology.from_edges(n, edges)


def brute_force_distances(topology: Topology) -> list[list[float]]:
    """Floyd-Warshall on the adjacency matrix; independent of any BFS."""
    n = topology.n
    inf = float("inf")
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for i in range(n):
        for j in topology.adjacency[i]:
            d[i][j] = 1
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][k] + d[k][j] < d[i][j]:
                    d[i][j] = d[i][k] + d[k][j]
    return d


def brute_force_reach(topology: Topology, origin: int, ttl: int) -> set[tuple[int, int]]:
    d = brute_force_distances(topology)[origin]
    return {(j, int(d[j])) for j in range(topology.n) if j != origin and d[j] <= ttl}


def record_criterion(number: int, passed: bool, message: str) -> None:
    ACCEPTANCE_LINES.append(f"[criterion {number:2d}] {'PASS' if passed else 'FAIL'}  {message}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return random.Random(1234)
