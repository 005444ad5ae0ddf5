import sys
from collections import deque
from itertools import product

import numpy as np
import pytest

from dfix import Graph


def bfs_distances(n, edges, src):
    """Hop distances from ``src`` following directed edges, loops ignored."""
    out = {v: [] for v in range(n)}
    for j, i in edges:
        if j != i:
            out[j].append(i)
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in out[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def bfs_diameter(g):
    """None if some vertex cannot reach another."""
    best = 0
    for s in range(g.n):
        dist = bfs_distances(g.n, g.edges, s)
        if len(dist) < g.n:
            return None
        best = max(best, max(dist.values()))
    return best


def brute_compose(g2, g1):
    """Edge set of ``g2 o g1`` by enumerating every intermediate vertex."""
    e1, e2 = g1.edges, g2.edges
    return {(j, i) for j, s, i in product(range(g1.n), repeat=3) if (j, s) in e1 and (s, i) in e2}


def random_digraph(rng, n, p):
    adj = rng.random((n, n)) < p
    return Graph.from_adjacency(adj)


def random_strong_digraph(rng, n, p):
    """Random digraph made strongly connected by overlaying a shuffled directed cycle."""
    adj = rng.random((n, n)) < p
    perm = rng.permutation(n)
    for a, b in zip(perm, np.roll(perm, -1)):
        adj[a, b] = True
    return Graph.from_adjacency(adj)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_by_two():
    from dfix.problems import LinearSystem

    A = np.array([[2.0, 1.0], [1.0, 2.0]])
    b = np.array([3.0, 3.0])
    return LinearSystem(A, b, np.array([1.0, 1.0]))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
