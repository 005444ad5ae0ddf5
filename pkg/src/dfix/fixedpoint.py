"""Fixed-point maps ``y = M y + d`` and their infinity-norm certificates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError
from .problems import LinearSystem

DEFAULT_THETA = 0.999


@dataclass(frozen=True)
class FixedPointMap:
    M: np.ndarray
    d: np.ndarray
    mu: float

    @classmethod
    def from_arrays(cls, M, d) -> "FixedPointMap":
        M = np.asarray(M, dtype=float)
        d = np.asarray(d, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or d.shape != (M.shape[0],):
            raise InvalidParameterError("M must be n x n and d of length n")
        return cls(M, d, float(np.abs(M).sum(axis=1).max()))

    @property
    def n(self) -> int:
        return self.d.shape[0]


def _diagonal(A: np.ndarray) -> np.ndarray:
    diag = np.diag(A)
    zero = np.flatnonzero(diag == 0)
    if zero.size:
        raise DomainError(f"zero diagonal entry in row {zero[0]}")
    return diag


def jor_map(sys: LinearSystem, alpha: float) -> FixedPointMap:
    """Jacobi over-relaxation: ``M = I - alpha D^-1 A``, ``d = alpha D^-1 b``.

    ``alpha = 1`` is plain Jacobi.
    """
    if alpha == 0:
        raise InvalidParameterError("relaxation parameter must be nonzero")
    diag = _diagonal(sys.A)
    M = np.eye(sys.n) - alpha * (sys.A / diag[:, None])
    d = alpha * sys.b / diag
    return FixedPointMap.from_arrays(M, d)


def paper_relaxation(sys: LinearSystem, theta: float = DEFAULT_THETA) -> float:
    """``theta * 2 / ||D^-1 A||_inf``.

    With ``theta = 1`` the worst row of ``M`` has absolute sum exactly 1, so
    the default backs off slightly to keep ``||M||_inf < 1``.
    """
    diag = _diagonal(sys.A)
    norm = np.abs(sys.A / diag[:, None]).sum(axis=1).max()
    return theta * 2.0 / norm


def centralized_iterate(fp: FixedPointMap, x0, k: int) -> np.ndarray:
    """Apply ``x <- M x + d`` ``k`` times."""
    if k < 0:
        raise InvalidParameterError(f"iteration count must be >= 0, got {k}")
    x = np.array(x0, dtype=float)
    for _ in range(k):
        x = fp.M @ x + fp.d
    return x


def contraction_bound(mu: float, w_min: float, window: int) -> float:
    """Error contraction factor over ``window`` consensus rounds.

    ``tau_1 = 1 - w_min (1 - mu)`` and ``tau_l = 1 - w_min (1 - tau_{l-1})``.
    """
    if not mu < 1:
        raise DomainError(f"contraction needs mu < 1, got {mu}")
    if not 0 < w_min < 1:
        raise DomainError(f"w_min must lie in (0, 1), got {w_min}")
    if window < 1:
        raise InvalidParameterError(f"window must be >= 1, got {window}")
    tau = 1.0 - w_min * (1.0 - mu)
    for _ in range(window - 1):
        tau = 1.0 - w_min * (1.0 - tau)
    return tau
