"""Fixed-point iteration drivers for interference maps.

The update ``p <- I(p)`` converges to the unique fixed point whenever the
map contracts in log coordinates (two-sided scalable maps do).  The same
holds when components update asynchronously from stale neighbor values
with bounded delay, which :func:`solve_async` simulates with a
deterministic delay schedule; with all delays zero it reproduces the
synchronous trace bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .interference import InterferenceModel
from .model import PowerBox, validate_power

__all__ = [
    "IterationTrace",
    "DelaySchedule",
    "solve_sync",
    "solve_async",
    "fixed_point_residual",
]

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITERS = 100_000
DIVERGENCE_FACTOR = 1e12


def fixed_point_residual(model: InterferenceModel, p) -> float:
    """Sup-norm distance ``|p - I(p)|_inf`` of ``p`` from being a fixed point."""
    arr = np.asarray(p, dtype=float)
    return float(np.max(np.abs(arr - model.evaluate(arr))))


@dataclass
class IterationTrace:
    """Full record of one solver run.

    ``powers[k]`` is the k-th iterate (row 0 is the start), ``residuals[k]``
    its sup-norm fixed-point residual.  ``verdict`` is ``"converged"``,
    ``"max-iters"`` or ``"diverged"``; ``final`` repeats the last iterate.
    """

    powers: np.ndarray
    residuals: np.ndarray
    verdict: str
    settings: dict[str, Any] = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return self.powers.shape[0] - 1

    @property
    def final(self) -> np.ndarray:
        return self.powers[-1]

    @property
    def converged(self) -> bool:
        return self.verdict == "converged"

    def header(self) -> list[str]:
        n = self.powers.shape[1]
        return ["k"] + [f"p_{i + 1}" for i in range(n)] + ["residual"]

    def rows(self):
        for k in range(self.powers.shape[0]):
            yield [k, *self.powers[k], self.residuals[k]]


@dataclass(frozen=True)
class DelaySchedule:
    """Deterministic per-step delay matrix generator.

    ``delays(k)[i, j]`` is how many iterations stale component ``j``'s
    value is when component ``i`` computes step ``k``; entries are drawn
    uniformly from ``{0, ..., max_delay}``.  The draw depends only on
    ``(seed, k)``, never on call order, so schedules replay exactly.
    """

    n: int
    max_delay: int
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_delay < 0:
            raise ValueError("max_delay must be nonnegative")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def delays(self, k: int) -> np.ndarray:
        if self.max_delay == 0:
            return np.zeros((self.n, self.n), dtype=int)
        rng = np.random.default_rng([self.seed, k])
        return rng.integers(0, self.max_delay + 1, size=(self.n, self.n))


def _too_large(p: np.ndarray, cap: float) -> bool:
    return not np.all(np.isfinite(p)) or bool(np.max(np.abs(p)) > cap)


def _divergence_cap(p0: np.ndarray, box: PowerBox | None) -> float:
    scale = float(np.max(box.p_max)) if box is not None else max(1.0, float(np.max(p0)))
    return DIVERGENCE_FACTOR * scale


def solve_sync(model: InterferenceModel, p0, tol: float = DEFAULT_TOL,
               max_iters: int = DEFAULT_MAX_ITERS, box: PowerBox | None = None,
               project: bool = False) -> IterationTrace:
    """Iterate ``p <- I(p)`` from ``p0`` until the residual drops below
    ``tol``.

    ``project=True`` clamps every iterate into ``box`` (which is then
    required); by default iterates run free and the box only scales the
    divergence guard.  Iterates blowing past ``1e12`` times the box top
    (or turning non-finite) end the run with verdict ``"diverged"``.
    """
    p = validate_power(p0, n=model.n)
    if project and box is None:
        raise ValueError("project=True requires a box")
    cap = _divergence_cap(p, box)
    powers = [p.copy()]
    residuals: list[float] = []
    verdict = "max-iters"
    clamped = False
    for _ in range(max_iters):
        ip = model.evaluate(p)
        r = float(np.max(np.abs(p - ip)))
        residuals.append(r)
        if r < tol:
            verdict = "converged"
            break
        nxt = ip
        if project:
            clipped = box.clip(nxt)
            clamped = clamped or bool(np.any(clipped != nxt))
            nxt = clipped
        if _too_large(nxt, cap):
            powers.append(np.asarray(nxt, dtype=float))
            residuals.append(float("inf"))
            verdict = "diverged"
            break
        p = np.asarray(nxt, dtype=float)
        powers.append(p.copy())
    else:
        residuals.append(fixed_point_residual(model, p))
    if verdict == "max-iters" and residuals[-1] < tol:
        verdict = "converged"
    return IterationTrace(
        powers=np.asarray(powers),
        residuals=np.asarray(residuals[:len(powers)]),
        verdict=verdict,
        settings={"mode": "sync", "tol": tol, "max_iters": max_iters,
                  "project": project, "clamped": clamped},
    )


def solve_async(model: InterferenceModel, p0, schedule: DelaySchedule,
                tol: float = DEFAULT_TOL, max_iters: int = DEFAULT_MAX_ITERS,
                box: PowerBox | None = None) -> IterationTrace:
    """Totally asynchronous iteration with bounded stale reads.

    Every component updates at every step, but component ``i`` computes
    its update from neighbor values ``schedule.delays(k)[i, j]`` steps
    old (clamped at the start of history).  Convergence is still judged
    on the true residual of the newest iterate, so traces are comparable
    with :func:`solve_sync`; a zero-delay schedule reproduces it exactly.
    """
    p = validate_power(p0, n=model.n)
    if schedule.n != model.n:
        raise ValueError(f"schedule dimension {schedule.n} does not match model ({model.n})")
    cap = _divergence_cap(p, box)
    n = model.n
    history = [p.copy()]
    powers = [p.copy()]
    residuals: list[float] = []
    verdict = "max-iters"
    for k in range(max_iters):
        r = fixed_point_residual(model, p)
        residuals.append(r)
        if r < tol:
            verdict = "converged"
            break
        d = schedule.delays(k)
        nxt = np.empty(n)
        for i in range(n):
            stale = np.empty(n)
            for j in range(n):
                stale[j] = history[max(0, len(history) - 1 - int(d[i, j]))][j]
            nxt[i] = model.evaluate(stale)[i]
        if _too_large(nxt, cap):
            powers.append(nxt)
            residuals.append(float("inf"))
            verdict = "diverged"
            break
        p = nxt
        history.append(p.copy())
        if len(history) > schedule.max_delay + 1:
            history.pop(0)
        powers.append(p.copy())
    else:
        residuals.append(fixed_point_residual(model, p))
    if verdict == "max-iters" and residuals[-1] < tol:
        verdict = "converged"
    return IterationTrace(
        powers=np.asarray(powers),
        residuals=np.asarray(residuals[:len(powers)]),
        verdict=verdict,
        settings={"mode": "async", "tol": tol, "max_iters": max_iters,
                  "max_delay": schedule.max_delay, "schedule_seed": schedule.seed},
    )
