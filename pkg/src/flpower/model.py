"""Core types for network power-control problems.

Conventions shared by the whole package:

* A power vector ``p`` is a strictly positive 1-d array of length ``n``;
  its log-coordinate is ``x = ln(p)``.
* The gradient of a map ``g: R^n -> R^m`` is stored as the ``n x m`` matrix
  ``[grad g]_{ij} = d g_j / d x_i``, i.e. the transpose of the usual
  Jacobian.  For square gradients in this orientation, ``norm_inf`` is the
  maximum absolute row sum and ``norm_one`` the maximum absolute column sum.
* Element-wise vector/matrix inequalities are meant componentwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "PowerBox",
    "NetworkScenario",
    "CostModel",
    "affine_interference",
    "cost_eval",
    "cost_eval_many",
    "cost_gradient",
    "norm_inf",
    "norm_one",
    "spectral_radius",
    "as_vector",
    "validate_power",
]


# ---------------------------------------------------------------------------
# small validation helpers
# ---------------------------------------------------------------------------

def as_vector(v, n: int | None = None, name: str = "vector") -> np.ndarray:
    """Coerce ``v`` to a 1-d float array, optionally checking its length."""
    arr = np.asarray(v, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-d, got shape {arr.shape}")
    if n is not None and arr.shape[0] != n:
        raise ValueError(f"{name} must have length {n}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def validate_power(p, n: int | None = None) -> np.ndarray:
    """Coerce and check a power vector (finite, strictly positive)."""
    arr = as_vector(p, n=n, name="power vector")
    if np.any(arr <= 0.0):
        raise ValueError("power vector must be strictly positive")
    return arr


# ---------------------------------------------------------------------------
# power box
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PowerBox:
    """Componentwise power limits ``0 <= p_min < p_max``.

    Log-domain helpers (``log_bounds``, ``sample_log_uniform``) additionally
    need ``p_min > 0`` and raise otherwise.
    """

    p_min: np.ndarray
    p_max: np.ndarray

    def __post_init__(self) -> None:
        p_min = as_vector(self.p_min, name="p_min")
        if np.any(p_min < 0.0):
            raise ValueError("p_min must be nonnegative")
        p_max = as_vector(self.p_max, n=p_min.shape[0], name="p_max")
        if np.any(p_max <= p_min):
            raise ValueError("p_max must exceed p_min componentwise")
        object.__setattr__(self, "p_min", p_min)
        object.__setattr__(self, "p_max", p_max)

    @property
    def n(self) -> int:
        return self.p_min.shape[0]

    def log_bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if np.any(self.p_min <= 0.0):
            raise ValueError("log bounds need a strictly positive p_min")
        return np.log(self.p_min), np.log(self.p_max)

    def clip(self, p) -> np.ndarray:
        return np.clip(np.asarray(p, dtype=float), self.p_min, self.p_max)

    def contains(self, p, slack: float = 0.0) -> bool:
        arr = as_vector(p, n=self.n, name="power vector")
        return bool(np.all(arr >= self.p_min - slack) and np.all(arr <= self.p_max + slack))

    def sample_log_uniform(self, rng: np.random.Generator, size: int | None = None) -> np.ndarray:
        """Draw powers log-uniformly over the box.

        Returns shape ``(n,)`` for ``size=None`` and ``(size, n)`` otherwise.
        """
        lo, hi = self.log_bounds()
        shape = (self.n,) if size is None else (size, self.n)
        return np.exp(rng.uniform(lo, hi, size=shape))

    def corners(self) -> np.ndarray:
        """All ``2^n`` box corners, one per row.  Guarded to n <= 20."""
        if self.n > 20:
            raise ValueError(f"refusing to enumerate 2^{self.n} corners")
        grids = np.meshgrid(*[(lo, hi) for lo, hi in zip(self.p_min, self.p_max)],
                            indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=-1)


# ---------------------------------------------------------------------------
# network scenario
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NetworkScenario:
    """An ``n``-link network: channel gains, target ratios, noise, power box.

    ``gains[i, j]`` is the gain from transmitter ``j`` into receiver ``i``;
    diagonal entries must be positive, off-diagonal entries nonnegative.
    ``tau`` holds the per-link target ratios (positive) and ``eta`` the
    receiver noise levels (nonnegative).
    """

    gains: np.ndarray
    tau: np.ndarray
    eta: np.ndarray
    box: PowerBox
    name: str = ""

    def __post_init__(self) -> None:
        g = np.asarray(self.gains, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"gains must be a square matrix, got shape {g.shape}")
        n = g.shape[0]
        if not np.all(np.isfinite(g)):
            raise ValueError("gains must be finite")
        if np.any(np.diag(g) <= 0.0):
            raise ValueError("gains must have a strictly positive diagonal")
        if np.any(g < 0.0):
            raise ValueError("gains must be nonnegative")
        tau = as_vector(self.tau, n=n, name="tau")
        if np.any(tau <= 0.0):
            raise ValueError("tau must be strictly positive")
        eta = as_vector(self.eta, n=n, name="eta")
        if np.any(eta < 0.0):
            raise ValueError("eta must be nonnegative")
        if self.box.n != n:
            raise ValueError(f"box dimension {self.box.n} does not match gains ({n})")
        object.__setattr__(self, "gains", g)
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "eta", eta)

    @property
    def n(self) -> int:
        return self.gains.shape[0]

    def coupling_matrix(self) -> np.ndarray:
        """Normalized cross-gain matrix ``F``: ``F[i, j] = tau_i G_ij / G_ii``
        off the diagonal and zero on it."""
        d = np.diag(self.gains)
        f = (self.tau / d)[:, None] * self.gains
        np.fill_diagonal(f, 0.0)
        return f

    def noise_offset(self) -> np.ndarray:
        """Normalized noise vector ``u``: ``u_i = tau_i eta_i / G_ii``."""
        return self.tau * self.eta / np.diag(self.gains)


def affine_interference(scenario: NetworkScenario, p) -> np.ndarray:
    """Per-link required power ``F p + u`` for the ratio targets in ``scenario``.

    Component ``i`` equals ``(tau_i / G_ii) (sum_{j != i} G_ij p_j + eta_i)``,
    the least own power that meets link ``i``'s target ratio against the
    other links' current powers.
    """
    arr = as_vector(p, n=scenario.n, name="power vector")
    return scenario.coupling_matrix() @ arr + scenario.noise_offset()


# ---------------------------------------------------------------------------
# cost models
# ---------------------------------------------------------------------------

_COST_KINDS = ("identity-vector", "sum", "weighted-log-sum", "weighted-power-product", "custom")


@dataclass(frozen=True)
class CostModel:
    """Monotone cost ``kappa: R^n_{>0} -> R^m`` used to rank feasible powers.

    Kinds:

    * ``identity-vector``   kappa(p) = p               (m = n)
    * ``sum``               kappa(p) = sum_i p_i        (m = 1)
    * ``weighted-log-sum``  kappa(p) = sum_i s_i ln p_i (m = 1, s > 0)
    * ``weighted-power-product``  kappa(p) = h(prod_i p_i^{s_i}) with
      ``h`` either ``"identity"`` or ``"log"`` (m = 1, s > 0)
    * ``custom``            user callables ``func`` and optional ``grad``

    ``grad`` for custom costs must return the ``n x m`` matrix in the
    package gradient orientation; when omitted it is approximated by
    central differences.
    """

    kind: str
    s: np.ndarray | None = None
    h: str = "identity"
    func: Callable[[np.ndarray], np.ndarray] | None = None
    grad: Callable[[np.ndarray], np.ndarray] | None = None
    m: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in _COST_KINDS:
            raise ValueError(f"unknown cost kind {self.kind!r}; expected one of {_COST_KINDS}")
        if self.kind in ("weighted-log-sum", "weighted-power-product"):
            if self.s is None:
                raise ValueError(f"cost kind {self.kind!r} requires weights s")
            s = as_vector(self.s, name="cost weights s")
            if np.any(s <= 0.0):
                raise ValueError("cost weights s must be strictly positive")
            object.__setattr__(self, "s", s)
        if self.kind == "weighted-power-product" and self.h not in ("identity", "log"):
            raise ValueError(f"unsupported wrapper h={self.h!r}; expected 'identity' or 'log'")
        if self.kind == "custom":
            if self.func is None or self.m is None:
                raise ValueError("custom cost requires func and output dimension m")

    def output_dim(self, n: int) -> int:
        if self.kind == "identity-vector":
            return n
        if self.kind == "custom":
            return int(self.m)  # type: ignore[arg-type]
        return 1


def cost_eval(cost: CostModel, p) -> np.ndarray:
    """Evaluate ``cost`` at ``p``; always returns a 1-d array of length m."""
    arr = as_vector(p, name="power vector")
    if cost.kind == "identity-vector":
        return arr.copy()
    if cost.kind == "sum":
        return np.array([arr.sum()])
    if np.any(arr <= 0.0) and cost.kind in ("weighted-log-sum", "weighted-power-product"):
        raise ValueError(f"cost kind {cost.kind!r} requires strictly positive p")
    if cost.kind == "weighted-log-sum":
        return np.array([float(cost.s @ np.log(arr))])
    if cost.kind == "weighted-power-product":
        ls = float(cost.s @ np.log(arr))
        return np.array([ls if cost.h == "log" else np.exp(ls)])
    out = as_vector(cost.func(arr), name="custom cost value")
    if out.shape[0] != cost.m:
        raise ValueError(f"custom cost returned length {out.shape[0]}, declared m={cost.m}")
    return out


def cost_eval_many(cost: CostModel, pts: np.ndarray) -> np.ndarray:
    """Evaluate ``cost`` on rows of ``pts`` (shape ``(N, n)``).

    Returns shape ``(N,)`` for scalar costs and ``(N, m)`` otherwise.
    Built-in kinds are vectorized; custom costs fall back to a row loop.
    """
    pts = np.asarray(pts, dtype=float)
    if cost.kind == "identity-vector":
        return pts.copy()
    if cost.kind == "sum":
        return pts.sum(axis=1)
    if cost.kind == "weighted-log-sum":
        return np.log(pts) @ cost.s
    if cost.kind == "weighted-power-product":
        ls = np.log(pts) @ cost.s
        return ls if cost.h == "log" else np.exp(ls)
    out = np.stack([cost_eval(cost, row) for row in pts])
    return out[:, 0] if out.shape[1] == 1 else out


def _central_diff_columns(func: Callable[[np.ndarray], np.ndarray], p: np.ndarray,
                          step: float = 1e-6) -> np.ndarray:
    """Central differences of ``func`` at ``p`` in the package orientation."""
    base = np.asarray(func(p), dtype=float)
    out = np.empty((p.shape[0], base.shape[0]))
    for i in range(p.shape[0]):
        h = step * max(1.0, abs(p[i]))
        hi = p.copy(); hi[i] += h
        lo = p.copy(); lo[i] -= h
        out[i, :] = (np.asarray(func(hi), float) - np.asarray(func(lo), float)) / (2.0 * h)
    return out


def cost_gradient(cost: CostModel, p) -> np.ndarray:
    """Gradient of ``cost`` at ``p`` as an ``n x m`` matrix,
    ``[out]_{ij} = d kappa_j / d p_i``."""
    arr = validate_power(p)
    n = arr.shape[0]
    if cost.kind == "identity-vector":
        return np.eye(n)
    if cost.kind == "sum":
        return np.ones((n, 1))
    if cost.kind == "weighted-log-sum":
        return (cost.s / arr)[:, None]
    if cost.kind == "weighted-power-product":
        col = cost.s / arr
        if cost.h == "identity":
            col = col * np.exp(float(cost.s @ np.log(arr)))
        return col[:, None]
    if cost.grad is not None:
        g = np.asarray(cost.grad(arr), dtype=float)
        if g.shape != (n, cost.m):
            raise ValueError(f"custom cost gradient must have shape {(n, cost.m)}, got {g.shape}")
        return g
    return _central_diff_columns(lambda q: cost_eval(cost, q), arr)


# ---------------------------------------------------------------------------
# matrix norms for gradients in the package orientation
# ---------------------------------------------------------------------------

def norm_inf(mat) -> float:
    """Maximum absolute row sum."""
    m = np.atleast_2d(np.asarray(mat, dtype=float))
    return float(np.abs(m).sum(axis=1).max())


def norm_one(mat) -> float:
    """Maximum absolute column sum."""
    m = np.atleast_2d(np.asarray(mat, dtype=float))
    return float(np.abs(m).sum(axis=0).max())


def spectral_radius(mat, tol: float = 1e-10, max_iters: int = 10_000) -> float:
    """Spectral radius of a square matrix.

    Uses a dense eigensolve up to 64x64.  Beyond that it switches to power
    iteration with sup-norm normalization, which is adequate for the
    nonnegative matrices this package produces; convergence is declared at
    relative tolerance ``tol`` and capped at ``max_iters`` steps.
    """
    m = np.atleast_2d(np.asarray(mat, dtype=float))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"spectral_radius needs a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n <= 64:
        return float(np.max(np.abs(np.linalg.eigvals(m))))
    v = np.full(n, 1.0 / n)
    lam_prev = 0.0
    for _ in range(max_iters):
        w = m @ v
        lam = float(np.max(np.abs(w)))
        if lam == 0.0:
            return 0.0
        v = w / lam
        if abs(lam - lam_prev) <= tol * max(1.0, lam):
            return lam
        lam_prev = lam
    return lam_prev
