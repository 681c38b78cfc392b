"""Certificates that the power-control fixed point is the cost optimum.

A problem whose constraint gradients and cost gradients pass one of the
qualifying conditions below has a unique optimum, and that optimum is
exactly the fixed point ``p = I(p)``, so iterating the map solves the
optimization problem.  All conditions are evaluated in log coordinates on
sampled points (random draws plus box corners), so a "holds" verdict is
sampled evidence with an explicit margin, and a "fails" verdict carries
the first violating sample in draw order.

Conditions checked, with ``q(x)`` the column-wise min/max ratio of
``grad f0``:

* Q1:   grad f0 >= 0 with no all-zero row; |grad f| < 1; grad f >= 0.
* Q2:   grad f0 > 0; (grad f)^2 >= 0; |grad f|_inf < q(x).
* Qinf: grad f0 > 0; |grad f|_inf < q(x) / (1 + q(x)).
* Qk:   grad f0 >= 0 with no all-zero row; |grad f| < 1;
        (grad f)^k >= 0; and for k > 1 the window sum
        |sum_{l=1}^{k-1} (grad f)^l|_inf < q(x).  A k = infinity flag
        waives the power-positivity condition (the powers vanish) and
        replaces the window sum by the full Neumann tail
        (I - grad f)^{-1} grad f.
* Qt2:  for decreasing maps.  (grad f)^2 >= 0; |grad f| <= B entrywise
        with spectral radius rho(B) < 1; and the cost must be of the
        separable form f0(x) = h(sum_i s_i x_i) with weights
        s = (I - B)^{-1} c for some positive c.  Any such cost makes the
        fixed point optimal even though grad f has negative entries,
        which none of the other conditions tolerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .interference import SIGN_SLACK, STRICT_SLACK
from .logdomain import LogProblem
from .model import CostModel, norm_inf, norm_one, spectral_radius

__all__ = [
    "ConditionEntry",
    "QualificationReport",
    "BBound",
    "CostNotIncreasingError",
    "q_ratio",
    "gradient_ratio",
    "b_bound",
    "check_Q1",
    "check_Q2",
    "check_Qinf",
    "check_Qk",
    "check_Qt2",
    "construct_t2_cost",
    "qualify_all",
]

K_MAX = 8  # upward search limit for Qk


class CostNotIncreasingError(ValueError):
    """The cost gradient has a column with no positive entry, so the
    min/max column ratio q is meaningless."""


# ---------------------------------------------------------------------------
# report types
# ---------------------------------------------------------------------------

@dataclass
class ConditionEntry:
    """Outcome of one qualifying condition on one problem.

    ``verdict`` is ``"holds"``, ``"fails"`` or ``"inapplicable"``;
    ``margin`` is the worst slack of the binding inequality over the
    sample set (positive iff it held everywhere, None when a sign
    condition broke before any margin was meaningful).
    """

    condition: str
    verdict: str
    margin: float | None
    samples: int
    seed: int
    witness: dict[str, Any] | None = None
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return self.verdict == "holds"


@dataclass
class QualificationReport:
    """All condition entries for one problem; ``certified`` if any held."""

    entries: list[ConditionEntry]

    @property
    def certified(self) -> bool:
        return any(e.holds for e in self.entries)

    def entry(self, condition: str) -> ConditionEntry:
        for e in self.entries:
            if e.condition == condition:
                return e
        raise KeyError(condition)

    def table(self) -> str:
        lines = [f"{'condition':<10} {'verdict':<13} {'margin':<12} note",
                 "-" * 58]
        for e in self.entries:
            margin = "-" if e.margin is None else f"{e.margin:.6g}"
            note = ""
            if e.verdict == "fails" and e.witness is not None:
                note = str(e.witness.get("violated", ""))
            elif e.verdict == "inapplicable":
                note = str(e.details.get("reason", ""))
            elif e.condition == "Qk" and "k" in e.details:
                note = f"k={e.details['k']}"
            lines.append(f"{e.condition:<10} {e.verdict:<13} {margin:<12} {note}")
        lines.append(f"certified: {self.certified}")
        return "\n".join(lines)


@dataclass
class BBound:
    """Entrywise bound ``B >= |grad f(x)|`` over the box.

    ``exact`` marks constant-gradient models where no inflation was
    applied; otherwise the sampled entrywise maximum is inflated by the
    ``inflation`` factor to hedge the gap between samples and supremum.
    """

    B: np.ndarray
    rho: float
    exact: bool
    samples: int
    seed: int
    inflation: float


# ---------------------------------------------------------------------------
# sampling helpers
# ---------------------------------------------------------------------------

def _sample_points(lp: LogProblem, samples: int, seed: int) -> np.ndarray:
    """Random log points plus box corners (corners appended last).

    Constant-gradient models collapse to a single representative point.
    """
    if lp.constant_log_gradient:
        lo, hi = lp.box.log_bounds()
        return 0.5 * (lo + hi)[None, :]
    rng = np.random.default_rng(seed)
    pts = list(lp.sample_x(rng, size=samples))
    if lp.n <= 12:
        pts.extend(lp.corner_x())
    return np.asarray(pts)


def gradient_ratio(grad0: np.ndarray) -> float:
    """Column-wise min/max ratio of a cost gradient matrix.

    Returns ``min_j (min_i M_ij / max_i M_ij)``; this is the factor by
    which the cheapest coordinate direction undercuts the dearest one,
    never above 1.  Raises :class:`CostNotIncreasingError` when some
    column has no positive entry.
    """
    m = np.atleast_2d(np.asarray(grad0, dtype=float))
    if m.shape[1] > m.shape[0] and m.shape[0] == 1:
        m = m.T  # single-column costs arrive as (n,) rows
    colmax = m.max(axis=0)
    if np.any(colmax <= 0.0):
        j = int(np.argmin(colmax))
        raise CostNotIncreasingError(
            f"cost gradient column {j} has no positive entry (max {colmax[j]:.3g})")
    return float(np.min(m.min(axis=0) / colmax))


def q_ratio(lp: LogProblem, x) -> float:
    """``q(x)`` for a log problem: :func:`gradient_ratio` of ``grad f0(x)``."""
    return gradient_ratio(lp.grad_f0(x))


def b_bound(lp: LogProblem, samples: int = 1000, seed: int = 0,
            inflation: float = 0.05) -> BBound:
    """Entrywise bound matrix for ``|grad f|`` over the box.

    Exact (zero inflation) for constant-gradient models; otherwise the
    entrywise maximum over random points and corners, inflated by
    ``inflation`` because a sampled maximum can undershoot the supremum.
    """
    if lp.constant_log_gradient:
        lo, hi = lp.box.log_bounds()
        B = np.abs(lp.grad_f(0.5 * (lo + hi)))
        return BBound(B=B, rho=spectral_radius(B), exact=True,
                      samples=1, seed=seed, inflation=0.0)
    pts = _sample_points(lp, samples, seed)
    B = np.zeros((lp.n, lp.n))
    for x in pts:
        np.maximum(B, np.abs(lp.grad_f(x)), out=B)
    B *= 1.0 + inflation
    return BBound(B=B, rho=spectral_radius(B), exact=False,
                  samples=len(pts), seed=seed, inflation=inflation)


# ---------------------------------------------------------------------------
# individual conditions
# ---------------------------------------------------------------------------

def _matnorm(name: str):
    if name == "inf":
        return norm_inf
    if name == "one":
        return norm_one
    raise ValueError(f"unknown norm {name!r}; expected 'inf' or 'one'")


def _grad0_nonneg_rows(grad0: np.ndarray) -> tuple[bool, dict[str, Any] | None]:
    """Q1/Qk cost condition: entrywise nonnegative, no all-zero row."""
    g = np.atleast_2d(grad0)
    if np.min(g) < -SIGN_SLACK:
        i, j = np.unravel_index(int(np.argmin(g)), g.shape)
        return False, {"violated": "grad_f0 >= 0", "entry": float(g[i, j]),
                       "i": int(i), "j": int(j)}
    rowmax = g.max(axis=1)
    if np.any(rowmax <= 0.0):
        i = int(np.argmin(rowmax))
        return False, {"violated": "grad_f0 has an all-zero row", "i": i}
    return True, None


def check_Q1(lp: LogProblem, samples: int = 1000, seed: int = 0,
             norm: str = "inf") -> ConditionEntry:
    """Q1: nondecreasing cost, contractive and nonnegative ``grad f``."""
    mat_norm = _matnorm(norm)
    pts = _sample_points(lp, samples, seed)
    worst = -np.inf
    for x in pts:
        ok, info = _grad0_nonneg_rows(lp.grad_f0(x))
        if not ok:
            info["x"] = x
            return ConditionEntry("Q1", "fails", None, len(pts), seed, info,
                                  {"norm": norm})
        g = lp.grad_f(x)
        if np.min(g) < -SIGN_SLACK:
            i, j = np.unravel_index(int(np.argmin(g)), g.shape)
            return ConditionEntry("Q1", "fails", None, len(pts), seed,
                                  {"violated": "grad_f >= 0", "x": x,
                                   "entry": float(g[i, j]), "i": int(i), "j": int(j)},
                                  {"norm": norm})
        worst = max(worst, mat_norm(g))
    margin = 1.0 - worst
    verdict = "holds" if margin > 0.0 else "fails"
    witness = None if verdict == "holds" else {"violated": f"norm_{norm}(grad_f) < 1",
                                               "max_norm": worst}
    return ConditionEntry("Q1", verdict, margin, len(pts), seed, witness, {"norm": norm})


def check_Q2(lp: LogProblem, samples: int = 1000, seed: int = 0) -> ConditionEntry:
    """Q2: strictly increasing cost, nonnegative squared ``grad f``, and
    ``|grad f|_inf`` below the cost ratio ``q(x)`` pointwise."""
    pts = _sample_points(lp, samples, seed)
    margin = np.inf
    for x in pts:
        try:
            q = q_ratio(lp, x)
        except CostNotIncreasingError as exc:
            return ConditionEntry("Q2", "inapplicable", None, len(pts), seed,
                                  details={"reason": str(exc)})
        if q <= 0.0:
            return ConditionEntry("Q2", "inapplicable", None, len(pts), seed,
                                  details={"reason": "q(x) <= 0: cost ratio gives no room",
                                           "x": list(map(float, x))})
        g = lp.grad_f(x)
        g2 = g @ g
        if np.min(g2) < -SIGN_SLACK:
            i, j = np.unravel_index(int(np.argmin(g2)), g2.shape)
            return ConditionEntry("Q2", "fails", None, len(pts), seed,
                                  {"violated": "(grad_f)^2 >= 0", "x": x,
                                   "entry": float(g2[i, j]), "i": int(i), "j": int(j)})
        margin = min(margin, q - norm_inf(g))
    verdict = "holds" if margin > 0.0 else "fails"
    witness = None if verdict == "holds" else {"violated": "norm_inf(grad_f) < q(x)"}
    return ConditionEntry("Q2", verdict, float(margin), len(pts), seed, witness)


def check_Qinf(lp: LogProblem, samples: int = 1000, seed: int = 0) -> ConditionEntry:
    """Qinf: strictly increasing cost and ``|grad f|_inf < q / (1 + q)``.

    The strongest and simplest condition: no sign constraint on
    ``grad f`` at all, so it covers maps that mix increasing and
    decreasing entries, at the price of the tighter threshold
    (q / (1 + q) never exceeds 1/2).
    """
    pts = _sample_points(lp, samples, seed)
    margin = np.inf
    for x in pts:
        try:
            q = q_ratio(lp, x)
        except CostNotIncreasingError as exc:
            return ConditionEntry("Qinf", "inapplicable", None, len(pts), seed,
                                  details={"reason": str(exc)})
        if q <= 0.0:
            return ConditionEntry("Qinf", "inapplicable", None, len(pts), seed,
                                  details={"reason": "q(x) <= 0: cost ratio gives no room"})
        margin = min(margin, q / (1.0 + q) - norm_inf(lp.grad_f(x)))
    verdict = "holds" if margin > 0.0 else "fails"
    witness = None if verdict == "holds" else {"violated": "norm_inf(grad_f) < q/(1+q)"}
    return ConditionEntry("Qinf", verdict, float(margin), len(pts), seed, witness)


def _check_Qk_fixed(lp: LogProblem, k, pts: np.ndarray, seed: int,
                    norm: str) -> ConditionEntry:
    mat_norm = _matnorm(norm)
    infinite = k == math.inf
    details: dict[str, Any] = {"norm": norm, "k": "inf" if infinite else int(k)}
    worst_norm = -np.inf
    worst_x = None
    window_margin = np.inf
    for x in pts:
        ok, info = _grad0_nonneg_rows(lp.grad_f0(x))
        if not ok:
            info["x"] = x
            return ConditionEntry("Qk", "fails", None, len(pts), seed, info, details)
        g = lp.grad_f(x)
        nrm = mat_norm(g)
        if nrm > worst_norm:
            worst_norm, worst_x = nrm, x
        if infinite:
            if nrm >= 1.0:
                # the geometric tail has no finite sum here
                return ConditionEntry("Qk", "fails", float(1.0 - nrm), len(pts), seed,
                                      {"violated": f"norm_{norm}(grad_f) < 1", "x": x,
                                       "value": nrm}, details)
            # Neumann tail sum_{l>=1} g^l = (I - g)^{-1} g; finite since |g| < 1.
            window = np.linalg.solve(np.eye(lp.n) - g, g)
        else:
            power = np.linalg.matrix_power(g, int(k))
            if np.min(power) < -SIGN_SLACK:
                i, j = np.unravel_index(int(np.argmin(power)), power.shape)
                return ConditionEntry("Qk", "fails", None, len(pts), seed,
                                      {"violated": f"(grad_f)^{k} >= 0", "x": x,
                                       "entry": float(power[i, j]), "i": int(i),
                                       "j": int(j)}, details)
            if k == 1:
                continue
            acc = np.zeros_like(g)
            term = np.eye(lp.n)
            for _ in range(int(k) - 1):
                term = term @ g
                acc += term
            window = acc
        try:
            q = q_ratio(lp, x)
        except CostNotIncreasingError as exc:
            return ConditionEntry("Qk", "inapplicable", None, len(pts), seed,
                                  details={**details, "reason": str(exc)})
        window_margin = min(window_margin, q - norm_inf(window))
    norm_margin = 1.0 - worst_norm
    if not infinite and k == 1:
        margin = norm_margin
    else:
        margin = min(norm_margin, window_margin)
    verdict = "holds" if margin > 0.0 else "fails"
    witness = None
    if verdict == "fails":
        if window_margin <= norm_margin:
            witness = {"violated": "window sum vs q(x)"}
        else:
            witness = {"violated": f"norm_{norm}(grad_f) < 1", "x": worst_x,
                       "max_norm": worst_norm}
    return ConditionEntry("Qk", verdict, float(margin), len(pts), seed, witness, details)


def check_Qk(lp: LogProblem, k: int | float | None = 1, samples: int = 1000,
             seed: int = 0, norm: str = "inf") -> ConditionEntry:
    """Qk for a fixed ``k``, ``math.inf``, or ``k=None`` to search upward.

    The search tries k = 1..K_MAX in order and returns the first entry
    that holds; if none does, the entry with the largest margin is
    returned and ``details["searched"]`` records the sweep.
    """
    pts = _sample_points(lp, samples, seed)
    if k is not None:
        if k != math.inf and (not float(k).is_integer() or k < 1):
            raise ValueError(f"k must be a positive integer or math.inf, got {k!r}")
        return _check_Qk_fixed(lp, k, pts, seed, norm)
    best: ConditionEntry | None = None
    for kk in range(1, K_MAX + 1):
        entry = _check_Qk_fixed(lp, kk, pts, seed, norm)
        if entry.holds:
            entry.details["searched"] = kk
            return entry
        if best is None or _entry_margin(entry) > _entry_margin(best):
            best = entry
    assert best is not None
    best.details["searched"] = K_MAX
    return best


def _entry_margin(entry: ConditionEntry) -> float:
    return -np.inf if entry.margin is None else entry.margin


def check_Qt2(lp: LogProblem, c: np.ndarray | None = None, samples: int = 1000,
              seed: int = 0, inflation: float = 0.05) -> ConditionEntry:
    """Qt2: certificate for decreasing (type-II) interference maps.

    Requires the squared gradient to be sign-free, a bound matrix ``B``
    with spectral radius below one, and a cost that is a strictly
    increasing function of ``sum_i s_i ln p_i`` whose weights solve
    ``(I - B) s = c`` for positive ``c``.  When ``c`` is omitted, the
    implied ``c = (I - B) s`` of the problem's own cost is tested for
    positivity; passing an explicit ``c`` instead checks the cost weights
    against ``(I - B)^{-1} c``.
    """
    pts = _sample_points(lp, samples, seed)
    for x in pts:
        g = lp.grad_f(x)
        g2 = g @ g
        if np.min(g2) < -SIGN_SLACK:
            i, j = np.unravel_index(int(np.argmin(g2)), g2.shape)
            return ConditionEntry("Qt2", "fails", None, len(pts), seed,
                                  {"violated": "(grad_f)^2 >= 0", "x": x,
                                   "entry": float(g2[i, j]), "i": int(i), "j": int(j)})
    bb = b_bound(lp, samples=samples, seed=seed, inflation=inflation)
    details: dict[str, Any] = {"rho_B": bb.rho, "exact_B": bb.exact}
    if bb.rho >= 1.0:
        return ConditionEntry("Qt2", "fails", 1.0 - bb.rho, len(pts), seed,
                              {"violated": "rho(B) < 1", "rho": bb.rho}, details)
    eye = np.eye(lp.n)
    if lp.cost.kind not in ("weighted-log-sum", "weighted-power-product"):
        return ConditionEntry("Qt2", "inapplicable", None, len(pts), seed,
                              details={**details,
                                       "reason": f"cost kind {lp.cost.kind!r} is not a "
                                                 "weighted product/log-sum"})
    s_cost = np.asarray(lp.cost.s, dtype=float)
    if c is None:
        c_implied = (eye - bb.B) @ s_cost
        details["s"] = s_cost
        details["c"] = c_implied
        if np.min(c_implied) <= 0.0:
            return ConditionEntry("Qt2", "inapplicable", None, len(pts), seed,
                                  details={**details,
                                           "reason": "cost weights do not dominate the "
                                                     "coupling: (I - B) s has a "
                                                     "nonpositive entry"})
    else:
        c_arr = np.asarray(c, dtype=float)
        if np.any(c_arr <= 0.0):
            raise ValueError("c must be strictly positive")
        s_req = np.linalg.solve(eye - bb.B, c_arr)
        details["s"] = s_req
        details["c"] = c_arr
        if not np.allclose(s_cost, s_req, rtol=1e-6, atol=0.0):
            return ConditionEntry("Qt2", "inapplicable", None, len(pts), seed,
                                  details={**details,
                                           "reason": "cost weights differ from "
                                                     "(I - B)^{-1} c"})
    margin = 1.0 - bb.rho
    return ConditionEntry("Qt2", "holds", float(margin), len(pts), seed, None, details)


def construct_t2_cost(B: BBound | np.ndarray, c, h: str = "log") -> CostModel:
    """Build a cost certified by Qt2 from a bound matrix and positive ``c``.

    Solves ``(I - B) s = c`` (s is positive by the Neumann series since
    ``B >= 0`` and ``rho(B) < 1``) and returns ``sum_i s_i ln p_i`` for
    ``h="log"`` or ``prod_i p_i^{s_i}`` for ``h="identity"``.
    """
    mat = B.B if isinstance(B, BBound) else np.asarray(B, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"B must be square, got shape {mat.shape}")
    if np.any(mat < 0.0):
        raise ValueError("B must be entrywise nonnegative")
    rho = spectral_radius(mat)
    if rho >= 1.0:
        raise ValueError(f"rho(B) = {rho:.6g} >= 1: no certified cost exists")
    c_arr = np.asarray(c, dtype=float)
    if c_arr.shape != (mat.shape[0],):
        raise ValueError(f"c must have shape {(mat.shape[0],)}, got {c_arr.shape}")
    if np.any(c_arr <= 0.0):
        raise ValueError("c must be strictly positive")
    s = np.linalg.solve(np.eye(mat.shape[0]) - mat, c_arr)
    if h == "log":
        return CostModel(kind="weighted-log-sum", s=s)
    if h == "identity":
        return CostModel(kind="weighted-power-product", s=s, h="identity")
    raise ValueError(f"unsupported wrapper h={h!r}; expected 'log' or 'identity'")


def qualify_all(lp: LogProblem, samples: int = 1000, seed: int = 0,
                norm: str = "inf", c: np.ndarray | None = None) -> QualificationReport:
    """Run every condition (Qk in search mode) and collect the report."""
    entries = [
        check_Q1(lp, samples=samples, seed=seed, norm=norm),
        check_Q2(lp, samples=samples, seed=seed),
        check_Qinf(lp, samples=samples, seed=seed),
        check_Qk(lp, k=None, samples=samples, seed=seed, norm=norm),
        check_Qt2(lp, c=c, samples=samples, seed=seed),
    ]
    return QualificationReport(entries=entries)
