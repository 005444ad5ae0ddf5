"""Directed communication graphs with mandatory self-loops.

Vertices are 0-based. An edge ``(j, i)`` means that ``j`` can send to ``i``,
so the in-neighbourhood of ``i`` is ``{j : (j, i) in edges}`` and always
contains ``i`` itself.
"""

from __future__ import annotations

from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.sparse import csgraph, csr_matrix

from .errors import DomainError, InvalidParameterError


class Graph:
    """Immutable directed graph on ``n`` vertices.

    Self-loops are added on construction and cannot be removed.
    ``adj[j, i]`` is True iff ``j`` sends to ``i``.
    """

    __slots__ = ("_adj",)

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 1:
            raise InvalidParameterError(f"vertex count must be positive, got {n}")
        adj = np.eye(n, dtype=bool)
        for j, i in edges:
            if not (0 <= j < n and 0 <= i < n):
                raise InvalidParameterError(f"edge ({j}, {i}) out of range for n={n}")
            adj[j, i] = True
        adj.flags.writeable = False
        self._adj = adj

    @classmethod
    def from_adjacency(cls, adj) -> "Graph":
        adj = np.array(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise InvalidParameterError("adjacency must be square")
        g = cls.__new__(cls)
        adj = adj | np.eye(adj.shape[0], dtype=bool)
        adj.flags.writeable = False
        g._adj = adj
        return g

    @property
    def n(self) -> int:
        return self._adj.shape[0]

    @property
    def adj(self) -> np.ndarray:
        return self._adj

    @property
    def edges(self) -> frozenset:
        js, is_ = np.nonzero(self._adj)
        return frozenset(zip(js.tolist(), is_.tolist()))

    @property
    def num_edges(self) -> int:
        """Number of directed non-loop edges."""
        return int(self._adj.sum()) - self.n

    def in_neighbors(self, i: int) -> list[int]:
        """In-neighbourhood of ``i``, including ``i``."""
        return np.flatnonzero(self._adj[:, i]).tolist()

    def in_degrees(self) -> np.ndarray:
        """In-degree of every vertex, self-loop excluded."""
        return self._adj.sum(axis=0) - 1

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self._adj, self._adj.T))

    def is_complete(self) -> bool:
        return bool(self._adj.all())

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self._adj, other._adj)

    def __hash__(self):
        return hash((self.n, self._adj.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"

    def to_text(self) -> str:
        """Edge-list text: header ``n <count>`` then one ``j i`` per line, loops omitted."""
        lines = [f"n {self.n}"]
        js, is_ = np.nonzero(self._adj)
        lines += [f"{j} {i}" for j, i in zip(js.tolist(), is_.tolist()) if j != i]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Graph":
        rows = [ln.split() for ln in text.splitlines() if ln.strip()]
        if not rows or len(rows[0]) != 2 or rows[0][0] != "n":
            raise InvalidParameterError("edge list must start with 'n <count>'")
        n = int(rows[0][1])
        edges = []
        for parts in rows[1:]:
            if len(parts) != 2:
                raise InvalidParameterError(f"malformed edge line: {' '.join(parts)!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls(n, edges)


def complete_graph(n: int) -> Graph:
    return Graph.from_adjacency(np.ones((n, n), dtype=bool))


def loops_only(n: int) -> Graph:
    return Graph(n)


def make_regular_graph(n: int, m: int) -> Graph:
    """Circulant ``m``-regular graph: ``i`` is linked to ``i +- 1, ..., i +- m/2`` mod ``n``."""
    if n < 1 or m <= 0 or m >= n or m % 2:
        raise InvalidParameterError(f"need 0 < m < n with m even, got n={n}, m={m}")
    adj = np.zeros((n, n), dtype=bool)
    idx = np.arange(n)
    for off in range(1, m // 2 + 1):
        adj[idx, (idx + off) % n] = True
        adj[idx, (idx - off) % n] = True
    return Graph.from_adjacency(adj)


def make_geometric_graph(positions, R: float) -> Graph:
    """Link every pair of points closer than ``R`` (strict)."""
    pos = np.asarray(positions, dtype=float)
    if R <= 0:
        raise InvalidParameterError(f"radius must be positive, got {R}")
    diff = pos[:, None, :] - pos[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=-1))
    return Graph.from_adjacency(dist < R)


def is_strongly_connected(g: Graph) -> bool:
    if g.n == 1:
        return True
    ncomp, _ = csgraph.connected_components(csr_matrix(g.adj), directed=True, connection="strong")
    return ncomp == 1


def diameter(g: Graph) -> int:
    """Largest shortest directed path length between distinct vertices."""
    if not is_strongly_connected(g):
        raise DomainError("diameter is undefined for a graph that is not strongly connected")
    if g.n == 1:
        # no distinct pairs; one round still suffices for the window bounds
        return 1
    off = g.adj & ~np.eye(g.n, dtype=bool)
    dist = csgraph.shortest_path(csr_matrix(off), directed=True, unweighted=True)
    return int(dist.max())


def compose(g2: Graph, g1: Graph) -> Graph:
    """``g2 o g1``: edge ``(j, i)`` iff some ``s`` has ``(j, s)`` in g1 and ``(s, i)`` in g2."""
    if g1.n != g2.n:
        raise InvalidParameterError(f"vertex counts differ: {g2.n} vs {g1.n}")
    prod = g1.adj.astype(np.int64) @ g2.adj.astype(np.int64)
    return Graph.from_adjacency(prod > 0)


def compose_sequence(seq: Sequence[Graph]) -> Graph:
    """``seq[0] o seq[1] o ... o seq[-1]``; the first hop is taken in the last graph."""
    if len(seq) == 0:
        raise InvalidParameterError("cannot compose an empty sequence")
    out = seq[-1]
    for g in reversed(seq[:-1]):
        out = compose(g, out)
    return out


def graph_power(g: Graph, m: int) -> Graph:
    if m < 1:
        raise InvalidParameterError(f"power must be >= 1, got {m}")
    return compose_sequence([g] * m)


def is_jointly_connected(seq: Sequence[Graph], mode: str = "full") -> bool:
    if len(seq) == 0:
        raise InvalidParameterError("empty graph list")
    if len({g.n for g in seq}) != 1:
        raise InvalidParameterError("graphs in the list have different vertex counts")
    h = compose_sequence(seq)
    if mode == "full":
        return h.is_complete()
    if mode == "strong":
        return is_strongly_connected(h)
    raise InvalidParameterError(f"mode must be 'full' or 'strong', got {mode!r}")


def is_repeatedly_jointly_strongly_connected(prefix: Sequence[Graph], tau0: int, l: int) -> bool:
    """Check every complete window ``[tau0 + k*l, tau0 + (k+1)*l]`` (inclusive) of ``prefix``."""
    if l < 1 or tau0 < 0:
        raise InvalidParameterError(f"need tau0 >= 0 and l >= 1, got tau0={tau0}, l={l}")
    if len(prefix) < tau0 + l + 1:
        raise InvalidParameterError("prefix is shorter than one window")
    start = tau0
    while start + l < len(prefix):
        if not is_jointly_connected(prefix[start : start + l + 1], mode="strong"):
            return False
        start += l
    return True


def sample_subgraph(g: Graph, gamma: float, rng: np.random.Generator) -> Graph:
    """Keep ``floor(gamma * |E_u|)`` undirected edges of ``g``, chosen uniformly, plus all loops."""
    if not 0 < gamma <= 1:
        raise InvalidParameterError(f"gamma must lie in (0, 1], got {gamma}")
    if not g.is_symmetric():
        raise InvalidParameterError("edge sampling needs an undirected (symmetric) graph")
    if gamma == 1:
        return g
    rows, cols = np.nonzero(np.triu(g.adj, k=1))
    keep = int(np.floor(gamma * rows.size))
    pick = rng.choice(rows.size, size=keep, replace=False)
    adj = np.zeros_like(g.adj)
    adj[rows[pick], cols[pick]] = True
    adj |= adj.T
    return Graph.from_adjacency(adj)


class GraphSequence:
    """Deterministic map from iteration index ``k`` to a :class:`Graph`."""

    def __init__(self, generator: Callable[[int], Graph], base: Graph | None = None,
                 gamma: float | None = None):
        self._generator = generator
        self.base = base
        self.gamma = gamma

    def __call__(self, k: int) -> Graph:
        return self._generator(k)

    def prefix(self, length: int) -> list[Graph]:
        return [self(k) for k in range(length)]

    @classmethod
    def constant(cls, g: Graph) -> "GraphSequence":
        return cls(lambda k: g, base=g, gamma=1.0)

    @classmethod
    def periodic(cls, graphs: Sequence[Graph]) -> "GraphSequence":
        graphs = list(graphs)
        return cls(lambda k: graphs[k % len(graphs)])

    @classmethod
    def sampled(cls, base: Graph, gamma: float, seed: int) -> "GraphSequence":
        """Each ``G_k`` keeps a ``gamma`` fraction of ``base``'s edges, drawn from the stream ``(seed, k)``."""
        if not 0 < gamma <= 1:
            raise InvalidParameterError(f"gamma must lie in (0, 1], got {gamma}")

        def gen(k):
            return sample_subgraph(base, gamma, np.random.default_rng([seed, k]))

        return cls(gen, base=base, gamma=gamma)
