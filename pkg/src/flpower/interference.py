"""Interference maps and sampling-based classification of their structure.

An interference map sends a positive power vector ``p`` to the vector of
least own powers ``I(p)`` that would satisfy every link's quality target.
Three structural classes matter downstream:

* standard:   I > 0, nondecreasing in p, and I(c p) < c I(p) for c > 1;
* type-II:    I > 0, nonincreasing in p, and I(c p) > I(p) / c for c > 1;
* two-sided:  I(q) is sandwiched between I(p) / c and c I(p) whenever
  p / c <= q <= c p (componentwise).

Both named classes imply the two-sided one, and two-sided maps make the
fixed-point iteration in :mod:`flpower.solver` contract in log coordinates.
The classifiers here are samplers: they can only certify "no violation
found", never a proof, but they report a deterministic witness when a
property fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

import numpy as np

from .model import (
    NetworkScenario,
    PowerBox,
    as_vector,
    validate_power,
    _central_diff_columns,
)

__all__ = [
    "InterferenceModel",
    "AffineModel",
    "MonomialModel",
    "OpportunisticModel",
    "ConstantModel",
    "CustomModel",
    "ClassificationVerdict",
    "interference_gradient",
    "classify_standard",
    "classify_type2",
    "classify_two_sided",
]

# Sampling tolerances: strict inequalities must clear STRICT_SLACK, sign
# constraints on gradients may dip below zero by SIGN_SLACK (finite
# differences produce harmless noise at that scale).
STRICT_SLACK = 1e-12
SIGN_SLACK = 1e-10


# ---------------------------------------------------------------------------
# model hierarchy
# ---------------------------------------------------------------------------

class InterferenceModel:
    """Base interference map.

    Subclasses set ``n`` and ``class_tag`` and implement :meth:`evaluate`;
    they should override :meth:`gradient` when an analytic form exists
    (the default is central differences).  ``class_tag`` is the class the
    model is *declared* to be in; the classifiers below test such claims.
    """

    n: int
    class_tag: str = "custom"
    has_analytic_gradient: bool = False
    # True when d(ln I_j)/d(ln p_i) does not depend on p (exact bound
    # matrices need no inflation in that case).
    has_constant_log_gradient: bool = False

    def evaluate(self, p) -> np.ndarray:
        raise NotImplementedError

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        """Row-wise :meth:`evaluate`; subclasses override with vector code."""
        pts = np.asarray(pts, dtype=float)
        return np.stack([self.evaluate(row) for row in pts])

    def gradient(self, p) -> np.ndarray:
        """``n x n`` matrix ``[out]_{ij} = d I_j / d p_i``."""
        arr = validate_power(p, n=self.n)
        return _central_diff_columns(self.evaluate, arr)


def interference_gradient(model: InterferenceModel, p) -> np.ndarray:
    """Gradient of ``model`` at ``p``, analytic when the model provides one."""
    return model.gradient(p)


class AffineModel(InterferenceModel):
    """Ratio-target interference ``I(p) = F p + u`` built from a scenario.

    Nondecreasing with strictly sublinear scaling whenever the noise
    offset is positive, i.e. a standard map.
    """

    has_analytic_gradient = True

    def __init__(self, scenario: NetworkScenario) -> None:
        self.scenario = scenario
        self.n = scenario.n
        self.F = scenario.coupling_matrix()
        self.u = scenario.noise_offset()
        self.class_tag = "standard" if np.all(self.u > 0.0) else "custom"

    def evaluate(self, p) -> np.ndarray:
        arr = as_vector(p, n=self.n, name="power vector")
        return self.F @ arr + self.u

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        return np.asarray(pts, dtype=float) @ self.F.T + self.u

    def gradient(self, p) -> np.ndarray:
        return self.F.T.copy()


class MonomialModel(InterferenceModel):
    """Monomial interference ``I_i(p) = exp(b_i) prod_j p_j^{A_ij}``.

    In log coordinates this map is exactly affine with constant gradient
    ``A^T``, which makes it the reference model for bound-matrix
    constructions.  The class tag is derived from the exponent signs:
    ``A <= 0`` with row sums above -1 gives a type-II map, ``A >= 0`` with
    row sums below 1 a standard one.
    """

    has_analytic_gradient = True
    has_constant_log_gradient = True

    def __init__(self, A, b, class_tag: str | None = None) -> None:
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"exponent matrix must be square, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("exponent matrix must be finite")
        self.A = A
        self.n = A.shape[0]
        self.b = as_vector(b, n=self.n, name="b")
        if class_tag is None:
            rows = A.sum(axis=1)
            if np.all(A <= 0.0) and np.all(rows > -1.0):
                class_tag = "type-II"
            elif np.all(A >= 0.0) and np.all(rows < 1.0):
                class_tag = "standard"
            else:
                class_tag = "custom"
        self.class_tag = class_tag

    def evaluate(self, p) -> np.ndarray:
        arr = validate_power(p, n=self.n)
        return np.exp(self.b + self.A @ np.log(arr))

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        return np.exp(self.b + np.log(np.asarray(pts, dtype=float)) @ self.A.T)

    def gradient(self, p) -> np.ndarray:
        arr = validate_power(p, n=self.n)
        val = self.evaluate(arr)
        return self.A.T * (val[None, :] / arr[:, None])

    def log_gradient(self) -> np.ndarray:
        """Constant log-domain gradient ``A^T``."""
        return self.A.T.copy()


class OpportunisticModel(InterferenceModel):
    """Inverse-interference map ``I_i(p) = c_i / (sum_{j!=i} G_ij p_j + eta_i)``.

    Models links that ride on low interference: the more the others send,
    the less power link ``i`` may claim.  Strictly decreasing in every
    cross power, hence type-II; positive noise ``eta`` is required (it
    also caps the log-domain column sums below one).
    """

    has_analytic_gradient = True

    def __init__(self, gains, eta, c) -> None:
        g = np.asarray(gains, dtype=float)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError(f"gains must be a square matrix, got shape {g.shape}")
        if np.any(g < 0.0) or not np.all(np.isfinite(g)):
            raise ValueError("gains must be nonnegative and finite")
        self.n = g.shape[0]
        self.cross = g.copy()
        np.fill_diagonal(self.cross, 0.0)  # own power never enters the sum
        self.eta = as_vector(eta, n=self.n, name="eta")
        if np.any(self.eta <= 0.0):
            raise ValueError("eta must be strictly positive for this model")
        self.c = as_vector(c, n=self.n, name="c")
        if np.any(self.c <= 0.0):
            raise ValueError("c must be strictly positive")
        self.class_tag = "type-II"

    def _den(self, p: np.ndarray) -> np.ndarray:
        return self.cross @ p + self.eta

    def evaluate(self, p) -> np.ndarray:
        arr = as_vector(p, n=self.n, name="power vector")
        return self.c / self._den(arr)

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        return self.c / (np.asarray(pts, dtype=float) @ self.cross.T + self.eta)

    def gradient(self, p) -> np.ndarray:
        arr = as_vector(p, n=self.n, name="power vector")
        den = self._den(arr)
        return -self.cross.T * (self.c / den**2)[None, :]


class ConstantModel(InterferenceModel):
    """Constant map ``I(p) = k > 0``: standard and type-II at once."""

    has_analytic_gradient = True
    has_constant_log_gradient = True

    def __init__(self, k) -> None:
        self.k = validate_power(k)
        self.n = self.k.shape[0]
        self.class_tag = "standard"

    def evaluate(self, p) -> np.ndarray:
        as_vector(p, n=self.n, name="power vector")
        return self.k.copy()

    def evaluate_many(self, pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=float)
        return np.broadcast_to(self.k, pts.shape).copy()

    def gradient(self, p) -> np.ndarray:
        return np.zeros((self.n, self.n))

    def log_gradient(self) -> np.ndarray:
        return np.zeros((self.n, self.n))


class CustomModel(InterferenceModel):
    """Wrap plain callables as an interference map."""

    def __init__(self, n: int, func: Callable[[np.ndarray], np.ndarray],
                 grad: Callable[[np.ndarray], np.ndarray] | None = None,
                 class_tag: str = "custom") -> None:
        self.n = int(n)
        self._func = func
        self._grad = grad
        self.class_tag = class_tag
        self.has_analytic_gradient = grad is not None

    def evaluate(self, p) -> np.ndarray:
        arr = as_vector(p, n=self.n, name="power vector")
        out = as_vector(self._func(arr), n=self.n, name="interference value")
        return out

    def gradient(self, p) -> np.ndarray:
        arr = validate_power(p, n=self.n)
        if self._grad is None:
            return _central_diff_columns(self.evaluate, arr)
        g = np.asarray(self._grad(arr), dtype=float)
        if g.shape != (self.n, self.n):
            raise ValueError(f"gradient must have shape {(self.n, self.n)}, got {g.shape}")
        return g


# ---------------------------------------------------------------------------
# classifiers
# ---------------------------------------------------------------------------

@dataclass
class ClassificationVerdict:
    """Outcome of a sampled class check.

    ``holds`` means no violation was found among ``samples`` draws; it is
    evidence, not proof.  On failure, ``property`` names the violated
    requirement and ``witness`` pins down the first violating sample in
    draw order, so reruns with the same seed reproduce it exactly.
    """

    checked: str
    holds: bool
    samples: int
    seed: int
    property: str | None = None
    witness: dict[str, Any] | None = None

    def describe(self) -> str:
        state = "no violation found" if self.holds else f"violates {self.property}"
        return f"{self.checked}: {state} ({self.samples} samples, seed {self.seed})"


def _scale_factors(rng: np.random.Generator, count: int) -> np.ndarray:
    """Scaling factors c drawn log-uniformly from (1, 2]."""
    return np.exp(rng.uniform(0.0, np.log(2.0), size=count))


def classify_standard(model: InterferenceModel, box: PowerBox,
                      samples: int = 1000, seed: int = 0) -> ClassificationVerdict:
    """Sample test for the standard class (positive, nondecreasing, sublinear
    scaling).

    Draws ``samples`` powers log-uniformly over ``box`` plus one scale
    factor each; monotonicity is checked through the gradient sign with
    slack ``SIGN_SLACK``, scaling strictness must clear ``STRICT_SLACK``.
    """
    rng = np.random.default_rng(seed)
    pts = box.sample_log_uniform(rng, size=samples)
    cs = _scale_factors(rng, samples)
    for idx in range(samples):
        p = pts[idx]
        val = model.evaluate(p)
        if np.any(val <= 0.0):
            i = int(np.argmin(val))
            return ClassificationVerdict("standard", False, samples, seed, "positivity",
                                         {"p": p, "i": i, "value": float(val[i])})
        grad = model.gradient(p)
        if np.min(grad) < -SIGN_SLACK:
            i, j = np.unravel_index(int(np.argmin(grad)), grad.shape)
            return ClassificationVerdict("standard", False, samples, seed, "monotonicity",
                                         {"p": p, "i": int(i), "j": int(j),
                                          "entry": float(grad[i, j])})
        c = float(cs[idx])
        margin = c * val - model.evaluate(c * p)
        if np.min(margin) <= STRICT_SLACK:
            i = int(np.argmin(margin))
            return ClassificationVerdict("standard", False, samples, seed, "scalability",
                                         {"p": p, "c": c, "i": i, "margin": float(margin[i])})
    return ClassificationVerdict("standard", True, samples, seed)


def classify_type2(model: InterferenceModel, box: PowerBox,
                   samples: int = 1000, seed: int = 0) -> ClassificationVerdict:
    """Sample test for the type-II class (positive, nonincreasing, and
    ``I(c p) > I(p) / c``)."""
    rng = np.random.default_rng(seed)
    pts = box.sample_log_uniform(rng, size=samples)
    cs = _scale_factors(rng, samples)
    for idx in range(samples):
        p = pts[idx]
        val = model.evaluate(p)
        if np.any(val <= 0.0):
            i = int(np.argmin(val))
            return ClassificationVerdict("type-II", False, samples, seed, "positivity",
                                         {"p": p, "i": i, "value": float(val[i])})
        grad = model.gradient(p)
        if np.max(grad) > SIGN_SLACK:
            i, j = np.unravel_index(int(np.argmax(grad)), grad.shape)
            return ClassificationVerdict("type-II", False, samples, seed, "monotonicity",
                                         {"p": p, "i": int(i), "j": int(j),
                                          "entry": float(grad[i, j])})
        c = float(cs[idx])
        margin = model.evaluate(c * p) - val / c
        if np.min(margin) <= STRICT_SLACK:
            i = int(np.argmin(margin))
            return ClassificationVerdict("type-II", False, samples, seed, "scalability",
                                         {"p": p, "c": c, "i": i, "margin": float(margin[i])})
    return ClassificationVerdict("type-II", True, samples, seed)


def classify_two_sided(model: InterferenceModel, box: PowerBox,
                       samples: int = 1000, seed: int = 0) -> ClassificationVerdict:
    """Sample test for two-sided scalability.

    Each draw takes ``p`` in the box, a factor ``c`` in (1, 2] and a
    companion ``q`` log-uniform inside the sandwich
    ``[p / c, c p]`` intersected with the box, then requires
    ``I(p) / c < I(q) < c I(p)`` componentwise (both sides strict).
    """
    rng = np.random.default_rng(seed)
    lo, hi = box.log_bounds()
    xs = rng.uniform(lo, hi, size=(samples, box.n))
    cs = _scale_factors(rng, samples)
    for idx in range(samples):
        x = xs[idx]
        c = float(cs[idx])
        lc = np.log(c)
        y = rng.uniform(np.maximum(lo, x - lc), np.minimum(hi, x + lc))
        p, q = np.exp(x), np.exp(y)
        vp, vq = model.evaluate(p), model.evaluate(q)
        lower = vq - vp / c
        if np.min(lower) <= STRICT_SLACK:
            i = int(np.argmin(lower))
            return ClassificationVerdict("two-sided", False, samples, seed, "lower-sandwich",
                                         {"p": p, "q": q, "c": c, "i": i,
                                          "margin": float(lower[i])})
        upper = c * vp - vq
        if np.min(upper) <= STRICT_SLACK:
            i = int(np.argmin(upper))
            return ClassificationVerdict("two-sided", False, samples, seed, "upper-sandwich",
                                         {"p": p, "q": q, "c": c, "i": i,
                                          "margin": float(upper[i])})
    return ClassificationVerdict("two-sided", True, samples, seed)
