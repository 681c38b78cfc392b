"""Slow, independent checks for solver and certificate results.

Nothing here shares code with the fast paths it validates: the affine
fixed point comes from a dense linear solve, optima come from exhaustive
log-grid search, and gradients from central differences.  Tests compare
the production routes against these.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .interference import InterferenceModel
from .model import CostModel, NetworkScenario, PowerBox, as_vector, cost_eval_many

__all__ = [
    "InfeasibleError",
    "GridSpec",
    "GridOptimum",
    "affine_fixed_point",
    "grid_pareto_optimum",
    "cell_cost_variation",
    "fd_gradient",
]

MAX_GRID_POINTS = 10_000_000
FEASIBILITY_SLACK = 1e-9  # absolute slack on p >= I(p) at grid points
_CHUNK = 200_000


class InfeasibleError(RuntimeError):
    """The constraint set admits no solution (or no grid point satisfies it)."""


@dataclass(frozen=True)
class GridSpec:
    """Grid over a power box, log-spaced by default.

    ``points_per_dim`` may be a single int or one int per dimension;
    the full product is capped at ``MAX_GRID_POINTS``.  Rows of
    :meth:`points` follow C order (last axis fastest), which fixes the
    tie-breaking of grid argmins.  ``spacing="linear"`` switches to
    even absolute steps (log spacing needs ``p_min > 0``).
    """

    box: PowerBox
    points_per_dim: int | tuple[int, ...] = 60
    spacing: str = "log"

    def __post_init__(self) -> None:
        ppd = self.points_per_dim
        if isinstance(ppd, int):
            ppd = (ppd,) * self.box.n
        else:
            ppd = tuple(int(v) for v in ppd)
        if len(ppd) != self.box.n:
            raise ValueError(f"need {self.box.n} per-dimension counts, got {len(ppd)}")
        if any(v < 2 for v in ppd):
            raise ValueError("points_per_dim must be at least 2")
        total = float(np.prod([float(v) for v in ppd]))
        if total > MAX_GRID_POINTS:
            raise ValueError(f"grid would have {total:.3g} points, cap is {MAX_GRID_POINTS:g}")
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"spacing must be 'log' or 'linear', got {self.spacing!r}")
        object.__setattr__(self, "points_per_dim", ppd)

    @property
    def n(self) -> int:
        return self.box.n

    def axes(self) -> list[np.ndarray]:
        if self.spacing == "linear":
            return [np.linspace(self.box.p_min[d], self.box.p_max[d],
                                self.points_per_dim[d]) for d in range(self.n)]
        lo, hi = self.box.log_bounds()
        return [np.exp(np.linspace(lo[d], hi[d], self.points_per_dim[d]))
                for d in range(self.n)]

    def cell_steps(self) -> list[tuple[str, float]]:
        """Per-dimension step to the next grid value: ``("mul", ratio)``
        for log spacing, ``("add", delta)`` for linear."""
        counts = np.asarray(self.points_per_dim, dtype=float)
        if self.spacing == "linear":
            deltas = (self.box.p_max - self.box.p_min) / (counts - 1.0)
            return [("add", float(d)) for d in deltas]
        lo, hi = self.box.log_bounds()
        ratios = np.exp((hi - lo) / (counts - 1.0))
        return [("mul", float(r)) for r in ratios]

    def cell_ratios(self) -> np.ndarray:
        """Multiplicative step between adjacent grid values, per dimension
        (log spacing only)."""
        if self.spacing != "log":
            raise ValueError("cell_ratios is defined for log spacing")
        lo, hi = self.box.log_bounds()
        counts = np.asarray(self.points_per_dim, dtype=float)
        return np.exp((hi - lo) / (counts - 1.0))

    def size(self) -> int:
        return int(np.prod(self.points_per_dim))

    def points(self) -> np.ndarray:
        grids = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


@dataclass
class GridOptimum:
    """Result of exhaustive feasible search on a grid.

    Scalar costs fill ``point``/``value``; vector costs fill
    ``pareto_points`` with the non-dominated feasible rows instead.
    """

    feasible_count: int
    point: np.ndarray | None = None
    value: float | None = None
    pareto_points: np.ndarray | None = None


def affine_fixed_point(scenario: NetworkScenario) -> np.ndarray:
    """Closed-form fixed point ``(I - F)^{-1} u`` of the affine map.

    Raises :class:`InfeasibleError` when the coupling spectral radius is
    1 or more, in which case no positive fixed point exists.
    """
    F = scenario.coupling_matrix()
    rho = float(np.max(np.abs(np.linalg.eigvals(F))))
    if rho >= 1.0:
        raise InfeasibleError(f"coupling spectral radius {rho:.6g} >= 1: targets unachievable")
    return np.linalg.solve(np.eye(scenario.n) - F, scenario.noise_offset())


def _pareto_front(points: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Non-dominated rows under componentwise <= on ``values``."""
    order = np.lexsort(values.T[::-1])
    kept_vals: list[np.ndarray] = []
    kept_idx: list[int] = []
    for idx in order:
        v = values[idx]
        dominated = any(np.all(kv <= v) and np.any(kv < v) for kv in kept_vals)
        if not dominated:
            kept_vals.append(v)
            kept_idx.append(int(idx))
    kept_idx.sort()
    return points[kept_idx]


def grid_pareto_optimum(model: InterferenceModel, cost: CostModel,
                        grid: GridSpec) -> GridOptimum:
    """Exhaustively minimize ``cost`` over feasible grid points.

    Feasibility is ``I(p) <= p + FEASIBILITY_SLACK`` componentwise.
    Evaluation is chunked to bound memory.  Scalar costs return the
    argmin (first row in C order on ties); vector costs return the
    non-dominated feasible set.  Raises :class:`InfeasibleError` when no
    grid point is feasible.
    """
    pts = grid.points()
    scalar = cost.output_dim(grid.n) == 1
    feasible_count = 0
    best_value = np.inf
    best_point: np.ndarray | None = None
    vec_pts: list[np.ndarray] = []
    vec_vals: list[np.ndarray] = []
    for start in range(0, pts.shape[0], _CHUNK):
        block = pts[start:start + _CHUNK]
        interference = model.evaluate_many(block)
        mask = np.all(interference <= block + FEASIBILITY_SLACK, axis=1)
        if not np.any(mask):
            continue
        feas = block[mask]
        feasible_count += feas.shape[0]
        vals = cost_eval_many(cost, feas)
        if scalar:
            vals = np.asarray(vals, dtype=float).reshape(-1)
            idx = int(np.argmin(vals))
            if vals[idx] < best_value:
                best_value = float(vals[idx])
                best_point = feas[idx].copy()
        else:
            vec_pts.append(feas)
            vec_vals.append(np.atleast_2d(vals))
    if feasible_count == 0:
        raise InfeasibleError("no feasible grid point")
    if scalar:
        return GridOptimum(feasible_count=feasible_count, point=best_point,
                           value=best_value)
    allp = np.concatenate(vec_pts)
    front = _pareto_front(allp, np.concatenate(vec_vals))
    return GridOptimum(feasible_count=feasible_count, pareto_points=front)


def cell_cost_variation(cost: CostModel, grid: GridSpec, p) -> float:
    """Cost change from moving one grid cell up from ``p`` in every
    dimension: the resolution limit of grid search at ``p``.
    Scalar costs only."""
    arr = as_vector(p, n=grid.n, name="power vector")
    if cost.output_dim(grid.n) != 1:
        raise ValueError("cell_cost_variation is defined for scalar costs")
    up = arr.copy()
    for d, (op, step) in enumerate(grid.cell_steps()):
        up[d] = up[d] * step if op == "mul" else up[d] + step
    base, moved = cost_eval_many(cost, np.stack([arr, up]))
    return float(abs(moved - base))


def fd_gradient(func: Callable[[np.ndarray], np.ndarray], x,
                step: float = 1e-6) -> np.ndarray:
    """Central-difference gradient in the package orientation.

    Returns the ``n x m`` matrix ``[out]_{ij} = d func_j / d x_i`` with a
    per-coordinate step ``step * max(1, |x_i|)``.
    """
    arr = np.asarray(x, dtype=float)
    base = np.atleast_1d(np.asarray(func(arr), dtype=float))
    out = np.empty((arr.shape[0], base.shape[0]))
    for i in range(arr.shape[0]):
        h = step * max(1.0, abs(arr[i]))
        hi = arr.copy(); hi[i] += h
        lo = arr.copy(); lo[i] -= h
        out[i, :] = (np.atleast_1d(np.asarray(func(hi), dtype=float))
                     - np.atleast_1d(np.asarray(func(lo), dtype=float))) / (2.0 * h)
    return out
