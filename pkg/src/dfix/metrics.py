"""Per-round cost accounting: scalars transmitted and scalar operations.

Multiplications and additions count one operation each; comparisons and
copies are free. For agent ``i`` with in-degree ``deg_i`` (self included)
and system size ``n``:

* DFIX:        ``2n`` (coordinate update) + ``(2 deg_i + 1) n`` (averaging)
* Harnessing:  ``2 (2 deg_i + 1) n`` (two averagings) + ``2 (2n) + 3n`` (gradients, step)
* Projection:  ``(2 deg_i + 1) n`` (neighbour sum) + ``4n + 2`` (rank-one projector)

Each directed non-loop edge carries one ``n``-vector per round; Harnessing
sends both its estimate and its tracker, so two.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvalidParameterError
from .graph import Graph

METHODS = ("dfix", "harnessing", "projection")
VECTORS_PER_EDGE = {"dfix": 1, "harnessing": 2, "projection": 1}


@dataclass(frozen=True)
class CostModel:
    method: str
    flops: int
    traffic: int


def _check(method):
    if method not in METHODS:
        raise InvalidParameterError(f"unknown method {method!r}; expected one of {METHODS}")


def traffic_per_iteration(g: Graph, n: int | None = None, vectors_per_edge: int = 1) -> int:
    """Scalars sent in one round; ``n`` defaults to the vertex count."""
    n = g.n if n is None else n
    return g.num_edges * n * vectors_per_edge


def flops_per_iteration(method: str, g: Graph, sys) -> int:
    _check(method)
    n = sys.n
    deg = (g.in_degrees() + 1).tolist()
    if method == "dfix":
        return sum((2 * n - 1) + 1 + (2 * d + 1) * n for d in deg)
    if method == "harnessing":
        return sum(2 * (2 * d + 1) * n + 2 * (2 * n) + 3 * n for d in deg)
    return sum((2 * d + 1) * n + 4 * n + 2 for d in deg)


def cost_model(method: str, g: Graph, sys) -> CostModel:
    _check(method)
    return CostModel(method, flops_per_iteration(method, g, sys),
                     traffic_per_iteration(g, sys.n, VECTORS_PER_EDGE[method]))
