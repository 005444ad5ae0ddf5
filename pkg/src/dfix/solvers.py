"""Synchronous-round simulations of DFIX and the two baseline methods.

Agent estimates are stored as the rows of an ``n x n`` array, so row ``i``
is agent ``i``'s full estimate of the solution. Every consensus product goes
through a weight or neighbourhood matrix whose zero pattern is the graph's,
which is what keeps each agent's update local.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .consensus import WeightMatrix, metropolis_weights, validate_weights
from .errors import DivergenceError, DomainError, InvalidParameterError
from .fixedpoint import FixedPointMap
from .graph import Graph, GraphSequence
from .metrics import cost_model
from .problems import LinearSystem

DEFAULT_TOL = 1e-4
DEFAULT_MAX_ITER = 200_000

CONVERGED = "converged"
MAX_ITER = "max-iterations"
DIVERGED = "diverged"

# ||M||_inf within this of 1 is a rounding artefact, not a contraction certificate
CERTIFY_MARGIN = 1e-12


@dataclass
class AgentStates:
    x: np.ndarray
    aux: np.ndarray | None = None
    k: int = 0


@dataclass
class RunTrace:
    method: str
    k: np.ndarray
    max_residual: np.ndarray
    error_inf: np.ndarray | None
    cum_flops: np.ndarray
    cum_traffic: np.ndarray
    status: str
    final: AgentStates
    config: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return int(self.k[-1])

    @property
    def total_flops(self) -> int:
        return int(self.cum_flops[-1])

    @property
    def total_traffic(self) -> int:
        return int(self.cum_traffic[-1])

    def rows(self):
        err = self.error_inf
        for r in range(len(self.k)):
            yield (int(self.k[r]), float(self.max_residual[r]),
                   None if err is None else float(err[r]),
                   int(self.cum_flops[r]), int(self.cum_traffic[r]))

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "max_residual", "error_inf", "cum_flops", "cum_traffic"])
            for k, res, err, fl, tr in self.rows():
                w.writerow([k, format(res, ".17g"), "" if err is None else format(err, ".17g"), fl, tr])


def _weights_array(w) -> np.ndarray:
    return w.entries if isinstance(w, WeightMatrix) else np.asarray(w, dtype=float)


def _check_finite(x, k):
    if not np.all(np.isfinite(x)):
        raise DivergenceError(f"non-finite agent state at iteration {k}")


def default_initialization(sys: LinearSystem) -> np.ndarray:
    """Agent ``i`` starts at ``(b_i / a_ii) e_i``, which lies on its own hyperplane."""
    diag = np.diag(sys.A)
    zero = np.flatnonzero(diag == 0)
    if zero.size:
        raise DomainError(f"zero diagonal entry in row {zero[0]}")
    return np.diag(sys.b / diag)


def termination_check(states: AgentStates, sys: LinearSystem, tol: float) -> tuple[bool, float]:
    """``max_i ||A x_i - b||_2 <= tol``."""
    res = np.linalg.norm(states.x @ sys.A.T - sys.b, axis=1).max()
    return bool(res <= tol), float(res)


def dfix_step(states: AgentStates, fp: FixedPointMap, w) -> AgentStates:
    """One DFIX round.

    Agent ``i`` replaces its own coordinate by ``M_i x_i + d_i``, keeps the
    others, then every agent averages the resulting vectors with ``w``.
    """
    X = states.x
    n = X.shape[0]
    if fp.n != X.shape[1] or _weights_array(w).shape != (n, n):
        raise InvalidParameterError("state, map and weight dimensions disagree")
    idx = np.arange(n)
    Xh = X.copy()
    Xh[idx, idx] = np.einsum("ij,ij->i", fp.M, X) + fp.d
    Xn = _weights_array(w) @ Xh
    _check_finite(Xn, states.k + 1)
    return AgentStates(Xn, None, states.k + 1)


def local_gradients(sys: LinearSystem, X: np.ndarray) -> np.ndarray:
    """Row ``i``: gradient of ``(A_i x - b_i)^2`` at agent ``i``'s estimate."""
    r = np.einsum("ij,ij->i", sys.A, X) - sys.b
    return 2.0 * sys.A * r[:, None]


def harnessing_step_size(sys: LinearSystem) -> float:
    """``1 / (3L)`` with ``L = max_i 2 ||A_i||_2^2``."""
    L = 2.0 * (sys.A**2).sum(axis=1).max()
    return 1.0 / (3.0 * L)


def harnessing_step(states: AgentStates, sys: LinearSystem, w, eta: float) -> AgentStates:
    """Gradient-tracking round: mix estimates and step along the tracker, then update the tracker."""
    W = _weights_array(w)
    X, S = states.x, states.aux
    Xn = W @ X - eta * S
    Sn = W @ S + local_gradients(sys, Xn) - local_gradients(sys, X)
    _check_finite(Xn, states.k + 1)
    _check_finite(Sn, states.k + 1)
    return AgentStates(Xn, Sn, states.k + 1)


def projection_step(states: AgentStates, sys: LinearSystem, g: Graph,
                    row_norms_sq: np.ndarray | None = None) -> AgentStates:
    """Project the neighbourhood disagreement onto ``ker A_i`` and subtract it."""
    A, X = sys.A, states.x
    if row_norms_sq is None:
        row_norms_sq = (A**2).sum(axis=1)
    nbr = g.adj.T.astype(float)
    deg = nbr.sum(axis=1)
    V = X - (nbr @ X) / deg[:, None]
    PV = V - A * (np.einsum("ij,ij->i", A, V) / row_norms_sq)[:, None]
    Xn = X - PV
    _check_finite(Xn, states.k + 1)
    return AgentStates(Xn, None, states.k + 1)


class _Schedule:
    """Resolves round ``k`` to its graph and Metropolis (or supplied) weights."""

    def __init__(self, schedule, weights=None):
        self._seq = None
        self._fixed = None
        if isinstance(schedule, Graph):
            if weights is None:
                weights = metropolis_weights(schedule)
            else:
                validate_weights(weights, schedule)
            self._fixed = (schedule, _weights_array(weights))
        elif isinstance(schedule, GraphSequence):
            if weights is not None:
                raise InvalidParameterError("explicit weights only apply to a fixed graph")
            self._seq = schedule
            self._last = (None, None)
        else:
            raise InvalidParameterError("schedule must be a Graph or a GraphSequence")

    def __call__(self, k):
        if self._fixed is not None:
            return self._fixed
        g = self._seq(k)
        if g is not self._last[0]:
            self._last = (g, metropolis_weights(g).entries)
        return self._last


def _simulate(method, sys, schedule, states, step, tol, max_iter, config, callback):
    if tol <= 0:
        raise InvalidParameterError(f"tolerance must be positive, got {tol}")
    if max_iter < 0:
        raise InvalidParameterError(f"max_iter must be >= 0, got {max_iter}")
    y = sys.y_star
    ks, res, errs, flops, traffic = [], [], [], [], []
    cum_f = cum_t = 0

    def record(st):
        passed, r = termination_check(st, sys, tol)
        ks.append(st.k)
        res.append(r)
        if y is not None:
            errs.append(float(np.abs(st.x - y).max()))
        flops.append(cum_f)
        traffic.append(cum_t)
        if callback is not None:
            callback(st)
        return passed

    status = CONVERGED if record(states) else MAX_ITER
    k = 0
    while status != CONVERGED and k < max_iter:
        g, W = schedule(k)
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                states = step(states, g, W)
        except DivergenceError:
            status = DIVERGED
            break
        cost = cost_model(method, g, sys)
        cum_f += cost.flops
        cum_t += cost.traffic
        k += 1
        if record(states):
            status = CONVERGED

    return RunTrace(
        method=method,
        k=np.array(ks),
        max_residual=np.array(res),
        error_inf=np.array(errs) if y is not None else None,
        cum_flops=np.array(flops, dtype=np.int64),
        cum_traffic=np.array(traffic, dtype=np.int64),
        status=status,
        final=states,
        config=dict(config, tol=tol, max_iter=max_iter),
    )


def _initial(sys, x0):
    X0 = default_initialization(sys) if x0 is None else np.array(x0, dtype=float)
    if X0.shape != (sys.n, sys.n):
        raise InvalidParameterError(f"x0 must be {sys.n} x {sys.n} (one row per agent)")
    return X0


def run_dfix(sys: LinearSystem, fp: FixedPointMap, schedule, x0=None, tol: float = DEFAULT_TOL,
             max_iter: int = DEFAULT_MAX_ITER, weights=None, certify: bool = True,
             callback: Callable[[AgentStates], None] | None = None) -> RunTrace:
    """Run DFIX on a fixed graph or a graph sequence until the residual test passes.

    ``certify=False`` lets a map with ``mu`` at or above 1 (up to rounding)
    run with a warning instead of an error.
    """
    if fp.n != sys.n:
        raise InvalidParameterError("fixed-point map and system sizes differ")
    if fp.mu >= 1 - CERTIFY_MARGIN:
        msg = f"||M||_inf = {fp.mu!r} >= 1; the contraction certificate does not apply"
        if certify:
            raise DomainError(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    sched = _Schedule(schedule, weights)
    states = AgentStates(_initial(sys, x0))
    return _simulate("dfix", sys, sched, states, lambda st, g, W: dfix_step(st, fp, W),
                     tol, max_iter, {"mu": fp.mu}, callback)


def run_harnessing(sys: LinearSystem, schedule, x0=None, eta: float | None = None,
                   tol: float = DEFAULT_TOL, max_iter: int = DEFAULT_MAX_ITER, weights=None,
                   callback: Callable[[AgentStates], None] | None = None) -> RunTrace:
    eta = harnessing_step_size(sys) if eta is None else eta
    if not eta > 0:
        raise InvalidParameterError(f"step size must be positive, got {eta}")
    sched = _Schedule(schedule, weights)
    X0 = _initial(sys, x0)
    states = AgentStates(X0, local_gradients(sys, X0))
    return _simulate("harnessing", sys, sched, states,
                     lambda st, g, W: harnessing_step(st, sys, W, eta),
                     tol, max_iter, {"eta": eta}, callback)


def run_projection(sys: LinearSystem, schedule, x0=None, tol: float = DEFAULT_TOL,
                   max_iter: int = DEFAULT_MAX_ITER,
                   callback: Callable[[AgentStates], None] | None = None) -> RunTrace:
    """Projection baseline; every initial estimate must satisfy its own equation ``A_i x_i = b_i``."""
    norms = (sys.A**2).sum(axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise DomainError(f"row {zero[0]} of A is zero")
    X0 = _initial(sys, x0)
    off = np.abs(np.einsum("ij,ij->i", sys.A, X0) - sys.b)
    if np.any(off > 1e-9 * (1.0 + np.abs(sys.b))):
        raise InvalidParameterError("x0 rows must solve their own equations A_i x = b_i")
    sched = _Schedule(schedule)
    return _simulate("projection", sys, sched, AgentStates(X0),
                     lambda st, g, W: projection_step(st, sys, g, norms),
                     tol, max_iter, {}, callback)
