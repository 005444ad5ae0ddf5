"""Test problem families: Simple Kriging covariance systems and random SDD systems."""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import InvalidParameterError


@dataclass(frozen=True)
class LinearSystem:
    A: np.ndarray
    b: np.ndarray
    y_star: np.ndarray | None = None
    provenance: dict = field(default_factory=lambda: {"kind": "custom"})

    @property
    def n(self) -> int:
        return self.b.shape[0]

    def residual_inf(self, y) -> float:
        return float(np.abs(self.A @ y - self.b).max())


def _with_reference(A, b, provenance) -> LinearSystem:
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float)
    A.flags.writeable = False
    b.flags.writeable = False
    y = np.linalg.solve(A, b)
    y.flags.writeable = False
    return LinearSystem(A, b, y, provenance)


def gaussian_kernel(t):
    """Covariance ``exp(-5 t^2)``; accepts scalars or arrays of distances."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise InvalidParameterError("distance must be nonnegative")
    out = np.exp(-5.0 * t**2)
    return float(out) if out.ndim == 0 else out


def _check_distinct(pos: np.ndarray):
    if len(np.unique(pos, axis=0)) != len(pos):
        raise InvalidParameterError("positions must be pairwise distinct")


def make_kriging_system(positions, target, kernel: Callable = gaussian_kernel) -> LinearSystem:
    pos = np.asarray(positions, dtype=float).reshape(-1, 2)
    target = np.asarray(target, dtype=float).reshape(2)
    _check_distinct(pos)
    dist = np.sqrt(((pos[:, None, :] - pos[None, :, :]) ** 2).sum(axis=-1))
    A = kernel(dist)
    b = kernel(np.sqrt(((pos - target) ** 2).sum(axis=-1)))
    prov = {"kind": "kriging", "positions": pos.copy(), "target": target.copy()}
    return _with_reference(A, np.atleast_1d(b), prov)


def grid_positions(side: int, half_width: float) -> np.ndarray:
    """``side x side`` regular grid on ``[-half_width, half_width]^2``."""
    ticks = np.linspace(-half_width, half_width, side)
    gx, gy = np.meshgrid(ticks, ticks, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()])


def uniform_positions(n: int, half_width: float, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-half_width, half_width, size=(n, 2))


def zero_mean(s):
    return 0.0


@dataclass(frozen=True)
class KrigingField:
    positions: np.ndarray
    samples: np.ndarray
    mean: Callable = zero_mean
    kernel: Callable = gaussian_kernel

    def __post_init__(self):
        _check_distinct(np.asarray(self.positions, dtype=float).reshape(-1, 2))


def kriging_predict(x, fld: KrigingField, target) -> float:
    """Simple Kriging predictor ``mu(target) + sum_i x_i (Z(s_i) - mu(s_i))``."""
    x = np.asarray(x, dtype=float)
    pos = np.asarray(fld.positions, dtype=float).reshape(-1, 2)
    if x.shape != (len(pos),):
        raise InvalidParameterError(f"weights have length {x.size}, field has {len(pos)} points")
    resid = np.asarray(fld.samples, dtype=float) - np.array([fld.mean(s) for s in pos])
    return float(fld.mean(np.asarray(target, dtype=float)) + x @ resid)


def make_sdd_system(n: int, rng: np.random.Generator) -> LinearSystem:
    """Symmetric strictly diagonally dominant system with uniform(0,1) data.

    ``A = (H + H^T)/2 + (n-1) I`` with ``H`` uniform in (0,1); ``b`` uniform in (0,1).
    """
    if n < 2:
        raise InvalidParameterError(f"need n >= 2, got {n}")
    H = rng.uniform(0.0, 1.0, size=(n, n))
    b = rng.uniform(0.0, 1.0, size=n)
    A = 0.5 * (H + H.T) + (n - 1) * np.eye(n)
    return _with_reference(A, b, {"kind": "sdd"})


def load_system(path) -> LinearSystem:
    """Read ``n``, then ``n`` rows of ``A``, then one row of ``b``.

    Numbers are parsed through :class:`decimal.Decimal`, so only plain
    decimal/scientific literals are accepted.
    """
    lines = [ln for ln in Path(path).read_text().splitlines() if ln.strip()]

    def parse_row(ln, lineno):
        try:
            return [float(Decimal(tok)) for tok in ln.split()]
        except InvalidOperation:
            raise InvalidParameterError(f"line {lineno}: not a decimal number row") from None

    try:
        n = int(lines[0].strip())
    except (IndexError, ValueError):
        raise InvalidParameterError("first line must hold the dimension n") from None
    if len(lines) != n + 2:
        raise InvalidParameterError(f"expected {n + 2} non-empty lines, found {len(lines)}")
    rows = [parse_row(ln, k + 2) for k, ln in enumerate(lines[1:])]
    if any(len(r) != n for r in rows):
        raise InvalidParameterError(f"every row must have {n} entries")
    A = np.array(rows[:n])
    b = np.array(rows[n])
    try:
        return _with_reference(A, b, {"kind": "custom", "path": str(path)})
    except np.linalg.LinAlgError:
        raise InvalidParameterError("system matrix is singular") from None
