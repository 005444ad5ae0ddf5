"""Row-stochastic consensus matrices aligned with a communication graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, WeightValidationError
from .graph import Graph

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class WeightMatrix:
    """Dense consensus matrix; ``entries[i, j] > 0`` iff ``j`` sends to ``i``."""

    entries: np.ndarray
    w_min: float

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def metropolis_weights(g: Graph) -> WeightMatrix:
    """Metropolis rule ``w_ij = 1 / (1 + max(deg_i, deg_j))`` with the diagonal closing each row.

    Degrees exclude self-loops, so an ``m``-regular graph gets ``1/(m+1)``
    on every nonzero entry.
    """
    if not g.is_symmetric():
        raise InvalidParameterError("Metropolis weights need an undirected (symmetric) graph")
    deg = g.in_degrees()
    link = g.adj.T & ~np.eye(g.n, dtype=bool)
    w = np.where(link, 1.0 / (1.0 + np.maximum.outer(deg, deg)), 0.0)
    np.fill_diagonal(w, 1.0 - w.sum(axis=1))
    w.flags.writeable = False
    return WeightMatrix(w, float(w[w > 0].min()))


def validate_weights(w, g: Graph) -> float:
    """Check Assumption-A2 style conditions on ``w`` against ``g``; return the smallest nonzero entry."""
    entries = w.entries if isinstance(w, WeightMatrix) else np.asarray(w, dtype=float)
    if entries.shape != (g.n, g.n):
        raise InvalidParameterError(f"weight matrix shape {entries.shape} does not match n={g.n}")
    neg = np.argwhere(entries < 0)
    if neg.size:
        i, j = neg[0]
        raise WeightValidationError(f"negative entry w[{i},{j}] = {entries[i, j]}")
    pattern = g.adj.T
    bad = np.argwhere((entries > 0) != pattern)
    if bad.size:
        i, j = bad[0]
        kind = "positive entry without an edge" if entries[i, j] > 0 else "zero entry on an edge"
        raise WeightValidationError(f"sparsity mismatch at w[{i},{j}]: {kind}")
    sums = entries.sum(axis=1)
    off = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOL)
    if off.size:
        i = off[0]
        raise WeightValidationError(f"row {i} sums to {sums[i]!r}, not 1")
    return float(entries[entries > 0].min())
