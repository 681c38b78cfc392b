"""Log-coordinate view of a power-control problem.

With ``x = ln p`` the interference map ``I`` and cost ``kappa`` become

    f(x)  = ln I(exp x),        f0(x) = kappa(exp x),

and the chain rule gives, in the package gradient orientation,

    grad f(x)  = diag(p) grad I(p) diag(1 / I(p)),
    grad f0(x) = diag(p) grad kappa(p),         p = exp(x).

Two-sided scalability of ``I`` turns into a sup-norm shrinking property of
``f`` (distances strictly contract) together with column sums of
``grad f`` staying below one.  Both are spot-checked here by sampling; the
box corners are always part of the sample set because extremes of the
box frequently attain the worst ratios.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np

from .interference import InterferenceModel
from .model import CostModel, PowerBox, as_vector, cost_gradient, cost_eval, norm_one

__all__ = [
    "LogProblem",
    "to_log_problem",
    "check_shrinking",
    "check_grad_norm1",
    "ShrinkReport",
    "GradNormReport",
]


@dataclass(frozen=True)
class LogProblem:
    """A model/cost pair viewed in log coordinates over a power box."""

    model: InterferenceModel
    cost: CostModel
    box: PowerBox

    def __post_init__(self) -> None:
        if self.model.n != self.box.n:
            raise ValueError(
                f"model dimension {self.model.n} does not match box ({self.box.n})")

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def m(self) -> int:
        return self.cost.output_dim(self.n)

    @property
    def constant_log_gradient(self) -> bool:
        return self.model.has_constant_log_gradient

    def f(self, x) -> np.ndarray:
        arr = as_vector(x, n=self.n, name="log power")
        val = self.model.evaluate(np.exp(arr))
        if np.any(val <= 0.0):
            raise ValueError("interference must be positive to take logs")
        return np.log(val)

    def f0(self, x) -> np.ndarray:
        arr = as_vector(x, n=self.n, name="log power")
        return cost_eval(self.cost, np.exp(arr))

    def grad_f(self, x) -> np.ndarray:
        arr = as_vector(x, n=self.n, name="log power")
        p = np.exp(arr)
        val = self.model.evaluate(p)
        if np.any(val <= 0.0):
            raise ValueError("interference must be positive to take logs")
        return p[:, None] * self.model.gradient(p) / val[None, :]

    def grad_f0(self, x) -> np.ndarray:
        arr = as_vector(x, n=self.n, name="log power")
        p = np.exp(arr)
        return p[:, None] * cost_gradient(self.cost, p)

    def sample_x(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        return np.log(self.box.sample_log_uniform(rng, size=size))

    def corner_x(self) -> np.ndarray:
        return np.log(self.box.corners())


def to_log_problem(model: InterferenceModel, cost: CostModel, box: PowerBox) -> LogProblem:
    """Bundle a model, a cost and a box into the log-coordinate view."""
    return LogProblem(model=model, cost=cost, box=box)


# ---------------------------------------------------------------------------
# sampled contraction diagnostics
# ---------------------------------------------------------------------------

@dataclass
class ShrinkReport:
    """Sampled check of ``max |f(x) - f(y)| < max |x - y|``.

    ``witness`` always records the pair attaining ``max_ratio`` (it is the
    diagnostic of interest whether or not the check holds).
    """

    holds: bool
    max_ratio: float
    pairs: int
    seed: int
    witness: dict[str, Any] | None = None


@dataclass
class GradNormReport:
    """Sampled check of ``norm_one(grad f(x)) < 1`` over the box."""

    holds: bool
    max_norm1: float
    samples: int
    seed: int
    witness: dict[str, Any] | None = None


def _corner_pairs(lp: LogProblem) -> list[tuple[np.ndarray, np.ndarray]]:
    """Deterministic extreme pairs: every corner against the log-center,
    plus the (p_min, p_max) diagonal."""
    lo, hi = lp.box.log_bounds()
    center = 0.5 * (lo + hi)
    pairs = [(lo.copy(), hi.copy())]
    if lp.n <= 12:
        for corner in lp.corner_x():
            if np.any(corner != center):
                pairs.append((corner, center.copy()))
    return pairs


def check_shrinking(lp: LogProblem, pairs: int = 1000, seed: int = 0) -> ShrinkReport:
    """Estimate the worst sup-norm expansion ratio of ``f`` over the box.

    Draws ``pairs`` random log-point pairs (plus the deterministic corner
    pairs) and reports ``max |f(x)-f(y)|_inf / |x-y|_inf``; the property
    holds when that stays below one.
    """
    rng = np.random.default_rng(seed)
    lo, hi = lp.box.log_bounds()
    xs = rng.uniform(lo, hi, size=(pairs, lp.n))
    ys = rng.uniform(lo, hi, size=(pairs, lp.n))
    candidates = list(zip(xs, ys)) + _corner_pairs(lp)
    best = -np.inf
    witness: dict[str, Any] | None = None
    for x, y in candidates:
        dxy = float(np.max(np.abs(x - y)))
        if dxy == 0.0:
            continue
        ratio = float(np.max(np.abs(lp.f(x) - lp.f(y)))) / dxy
        if ratio > best:
            best = ratio
            witness = {"x": x, "y": y, "ratio": ratio}
    return ShrinkReport(holds=bool(best < 1.0), max_ratio=best,
                        pairs=pairs, seed=seed, witness=witness)


def check_grad_norm1(lp: LogProblem, samples: int = 1000, seed: int = 0) -> GradNormReport:
    """Estimate the worst column-sum norm of ``grad f`` over the box.

    Random log points plus all box corners; the property holds when the
    maximum stays below one.  For constant-gradient models one evaluation
    suffices and the sample loop is skipped.
    """
    rng = np.random.default_rng(seed)
    lo, hi = lp.box.log_bounds()
    if lp.constant_log_gradient:
        x = lo.copy()
        val = norm_one(lp.grad_f(x))
        return GradNormReport(holds=bool(val < 1.0), max_norm1=val, samples=1,
                              seed=seed, witness={"x": x, "norm1": val})
    xs = list(rng.uniform(lo, hi, size=(samples, lp.n)))
    if lp.n <= 12:
        xs.extend(lp.corner_x())
    best = -np.inf
    witness: dict[str, Any] | None = None
    for x in xs:
        val = norm_one(lp.grad_f(x))
        if val > best:
            best = val
            witness = {"x": np.asarray(x), "norm1": val}
    return GradNormReport(holds=bool(best < 1.0), max_norm1=best,
                          samples=len(xs), seed=seed, witness=witness)
