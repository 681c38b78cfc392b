"""Outage smoothing of interference maps under random channel scaling.

When the actual ratio requirement is "meet the target unless the fade
``Theta`` pushes it past the cutoff ``b``", averaging over the fade turns
a hard-thresholded map into the smooth one

    f_j(p) = I_j(p) * T_j(I_j(p) / b),      T_j(z) = int_z^inf theta_j(y)/y dy,

with ``theta_j`` the fade density of link ``j``.  The derivative of the
smoothed value with respect to the raw one is

    Omega_j(z) = T_j(z) - theta_j(z),

so gradients of ``f`` are gradients of ``I`` scaled columnwise by
``Omega``, and every contraction argument reduces to bounding
``|Omega|`` from above.  This module carries the two closed-form fade
families (Rayleigh and exponential), their worst-case ``|Omega|``
analysis, and the combined certificate check.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Callable

import numpy as np
from scipy import integrate, optimize, special

from .interference import InterferenceModel
from .model import CostModel, PowerBox, as_vector, cost_gradient, norm_inf
from .qualifiers import CostNotIncreasingError, gradient_ratio

__all__ = [
    "FadingModel",
    "RayleighFading",
    "ExponentialFading",
    "CustomFading",
    "SmoothedModel",
    "SmallRatioWarning",
    "smoothed_eval",
    "smoothed_value",
    "omega",
    "psi",
    "xi1",
    "sigma_zmin",
    "sigma_stationary_points",
    "rayleigh_max_abs_omega",
    "corollary1_check",
    "Corollary1Verdict",
]

DEFAULT_Z_FLOOR = 1e-3


class SmallRatioWarning(UserWarning):
    """Raised (as a warning) when a smoothed evaluation sees a raw-to-cutoff
    ratio below the declared floor; worst-case constants certified down to
    that floor do not cover the point."""


# ---------------------------------------------------------------------------
# fade families
# ---------------------------------------------------------------------------

class FadingModel:
    """Density of a positive fade variable with the integrals smoothing needs.

    Subclasses implement ``pdf`` and ``tail_over_y``; the default
    ``max_abs_omega`` scans a log grid, closed-form families override it.
    """

    kind: str = "custom"

    def pdf(self, y):
        raise NotImplementedError

    def tail_over_y(self, z):
        """``T(z) = int_z^inf pdf(y) / y dy`` for ``z > 0``."""
        raise NotImplementedError

    def omega(self, z):
        return self.tail_over_y(z) - self.pdf(z)

    def max_abs_omega(self, z_min: float) -> float:
        """Worst ``|Omega|`` over ``z >= z_min`` (numeric fallback)."""
        if z_min <= 0.0:
            raise ValueError("z_min must be positive")
        zs = np.exp(np.linspace(np.log(z_min), np.log(z_min) + np.log(1e6), 4000))
        return float(np.max(np.abs(self.omega(zs))))


@dataclass(frozen=True)
class RayleighFading(FadingModel):
    """Rayleigh fade: ``pdf(y) = (y / lam^2) exp(-y^2 / (2 lam^2))``.

    Both integrals are elementary;  ``Omega`` starts at the supremum
    ``sqrt(pi/2) / lam`` as ``z -> 0``, decreases through zero to its
    single interior minimum at ``z = sqrt(2) lam`` and creeps back to
    zero from below, so the worst ``|Omega|`` on a tail ``z >= z_min``
    is attained either at ``z_min`` or at that minimum.
    """

    lam: float
    kind: str = "rayleigh"

    def __post_init__(self) -> None:
        if self.lam <= 0.0:
            raise ValueError("lam must be positive")

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        return (y / self.lam**2) * np.exp(-(y**2) / (2.0 * self.lam**2))

    def tail_over_y(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z < 0.0):
            raise ValueError("z must be nonnegative")
        return np.sqrt(np.pi / 2.0) / self.lam * special.erfc(z / (np.sqrt(2.0) * self.lam))

    def max_abs_omega(self, z_min: float) -> float:
        if z_min <= 0.0:
            raise ValueError("z_min must be positive")
        dip = max(z_min, np.sqrt(2.0) * self.lam)
        return float(max(abs(self.omega(z_min)), abs(self.omega(dip))))


@dataclass(frozen=True)
class ExponentialFading(FadingModel):
    """Exponential fade: ``pdf(y) = lam exp(-lam y)``.

    Here ``Omega(z) = lam * psi(lam z)`` with ``psi`` the universal
    profile below, so every worst-case question reduces to the scalar
    analysis of ``psi``.
    """

    lam: float
    kind: str = "exponential"

    def __post_init__(self) -> None:
        if self.lam <= 0.0:
            raise ValueError("lam must be positive")

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        return self.lam * np.exp(-self.lam * y)

    def tail_over_y(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0.0):
            raise ValueError("z must be positive")
        return self.lam * special.exp1(self.lam * z)

    def omega(self, z):
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0.0):
            raise ValueError("z must be positive")
        return self.lam * psi(self.lam * z)

    def max_abs_omega(self, z_min: float) -> float:
        return sigma_zmin(z_min, self.lam)


class CustomFading(FadingModel):
    """Quadrature-backed fade from a plain density callable on (0, inf)."""

    def __init__(self, pdf: Callable[[float], float], check_normalization: bool = True) -> None:
        self._pdf = pdf
        self.kind = "custom"
        if check_normalization:
            total, _ = integrate.quad(pdf, 0.0, np.inf)
            if abs(total - 1.0) > 1e-6:
                raise ValueError(f"pdf integrates to {total:.8g}, expected 1")

    def pdf(self, y):
        y = np.asarray(y, dtype=float)
        if y.ndim == 0:
            return float(self._pdf(float(y)))
        return np.array([self._pdf(float(v)) for v in y])

    def tail_over_y(self, z):
        z = np.asarray(z, dtype=float)

        def one(zv: float) -> float:
            if zv <= 0.0:
                raise ValueError("z must be positive")
            val, _ = integrate.quad(lambda y: self._pdf(y) / y, zv, np.inf)
            return val

        if z.ndim == 0:
            return one(float(z))
        return np.array([one(float(v)) for v in z])


def omega(fading: FadingModel, z):
    """Derivative ``d(smoothed)/d(raw)`` of the smoothing at ratio ``z``."""
    return fading.omega(z)


# ---------------------------------------------------------------------------
# exponential profile psi and its worst-case analysis
# ---------------------------------------------------------------------------

def psi(xi):
    """Universal exponential-fade profile ``psi(xi) = E1(xi) - exp(-xi)``.

    ``Omega(z) = lam * psi(lam z)`` for an exponential fade.  The profile
    decreases from +inf, crosses zero, bottoms out at ``xi = 1`` with
    value ``psi(1) ~= -0.1485`` and returns to zero from below; its
    derivative is ``exp(-xi) (1 - 1/xi)``.
    """
    arr = np.asarray(xi, dtype=float)
    if np.any(arr <= 0.0):
        raise ValueError("xi must be positive")
    return special.exp1(arr) - np.exp(-arr)


@lru_cache(maxsize=1)
def xi1() -> float:
    """The ratio below 1 where ``psi`` equals ``|psi(1)|``.

    Splits the worst-case analysis: for ``lam * z_min`` below this value
    the positive head of ``psi`` dominates, beyond it the negative dip
    does.
    """
    target = -float(psi(1.0))
    return float(optimize.brentq(lambda t: float(psi(t)) - target, 1e-12, 1.0,
                                 xtol=1e-14, rtol=8.9e-16))


def sigma_zmin(z_min: float, lam: float) -> float:
    """Worst ``|Omega|`` over ``z >= z_min`` for an exponential fade.

    Three regimes in ``u = lam * z_min``: below ``xi1()`` the value at
    ``z_min`` itself wins; between ``xi1()`` and 1 the interior dip at
    ``z = 1 / lam`` wins with value ``lam |psi(1)|``; above 1 the dip
    lies left of the window and ``|Omega(z_min)|`` wins again.
    """
    if lam <= 0.0 or z_min <= 0.0:
        raise ValueError("lam and z_min must be positive")
    u = lam * z_min
    if u < xi1():
        return float(lam * psi(u))
    if u <= 1.0:
        return float(-lam * psi(1.0))
    return float(-lam * psi(u))


@lru_cache(maxsize=1)
def sigma_stationary_points() -> tuple[float, float]:
    """Stationary points of ``u |psi(u)|`` (u = lam * z_min).

    These locate the two local maxima of ``lam -> sigma_zmin(z_min, lam)``
    at fixed ``z_min``: both solve ``psi(u) + exp(-u)(u - 1) = 0``; the
    first sits in the positive head, the second in the negative dip,
    and the dip one is the global worst case.
    """
    fun = lambda u: float(psi(u)) + np.exp(-u) * (u - 1.0)
    v1 = optimize.brentq(fun, 0.01, 0.5, xtol=1e-14, rtol=8.9e-16)
    v2 = optimize.brentq(fun, 0.5, 5.0, xtol=1e-14, rtol=8.9e-16)
    return float(v1), float(v2)


def rayleigh_max_abs_omega(lam: float) -> float:
    """Supremum of ``|Omega|`` over all ``z > 0`` for a Rayleigh fade:
    ``sqrt(pi/2) / lam``, approached as ``z -> 0``."""
    if lam <= 0.0:
        raise ValueError("lam must be positive")
    return float(np.sqrt(np.pi / 2.0) / lam)


# ---------------------------------------------------------------------------
# smoothed interference model
# ---------------------------------------------------------------------------

def smoothed_value(fading: FadingModel, b: float, raw):
    """Scalar smoothing map ``v -> v * T(v / b)`` (zero at ``v = 0``).

    Absolutely subhomogeneous: scaling ``v`` by ``exp(a)`` moves the
    value by at most ``exp(|a|)`` either way, which is what makes
    smoothed problems two-sided scalable.
    """
    if b <= 0.0:
        raise ValueError("cutoff b must be positive")
    v = np.asarray(raw, dtype=float)
    if np.any(v < 0.0):
        raise ValueError("raw value must be nonnegative")
    out = np.zeros_like(v, dtype=float)
    pos = v > 0.0
    if np.any(pos):
        out[pos] = v[pos] * fading.tail_over_y(v[pos] / b)
    return out if out.ndim else float(out)


class SmoothedModel(InterferenceModel):
    """Interference map smoothed link-by-link by fade averaging.

    ``fadings`` is one model per link (a single model is broadcast) and
    ``b`` the outage cutoff (scalar or per link).  Ratios ``I_j / b_j``
    below ``z_floor`` trigger :class:`SmallRatioWarning`: values still
    evaluate, but certificates derived from ``max_abs_omega(z_floor)``
    do not cover them.  The map is generally neither nondecreasing nor
    nonincreasing (``Omega`` changes sign), yet it stays two-sided
    scalable whenever the base map is.
    """

    def __init__(self, base: InterferenceModel, fadings, b,
                 z_floor: float = DEFAULT_Z_FLOOR) -> None:
        self.base = base
        self.n = base.n
        if isinstance(fadings, FadingModel):
            fadings = [fadings] * base.n
        self.fadings: list[FadingModel] = list(fadings)
        if len(self.fadings) != base.n:
            raise ValueError(f"need {base.n} fade models, got {len(self.fadings)}")
        self.b = as_vector(np.broadcast_to(np.asarray(b, dtype=float), (base.n,)), name="b")
        if np.any(self.b <= 0.0):
            raise ValueError("cutoff b must be positive")
        if z_floor <= 0.0:
            raise ValueError("z_floor must be positive")
        self.z_floor = float(z_floor)
        self.class_tag = "smoothed"
        self.has_analytic_gradient = base.has_analytic_gradient

    def _ratios(self, p: np.ndarray) -> np.ndarray:
        raw = self.base.evaluate(p)
        if np.any(raw <= 0.0):
            raise ValueError("base interference must be positive for smoothing")
        z = raw / self.b
        if np.any(z < self.z_floor):
            j = int(np.argmin(z))
            warnings.warn(
                f"ratio I_{j + 1}/b = {z[j]:.3g} below the floor {self.z_floor:g}; "
                "worst-case constants do not cover this point",
                SmallRatioWarning, stacklevel=3)
        return z

    def evaluate(self, p) -> np.ndarray:
        arr = as_vector(p, n=self.n, name="power vector")
        raw = self.base.evaluate(arr)
        z = self._ratios(arr)
        tails = np.array([self.fadings[j].tail_over_y(z[j]) for j in range(self.n)])
        return raw * tails

    def gradient(self, p) -> np.ndarray:
        arr = as_vector(p, n=self.n, name="power vector")
        z = self._ratios(arr)
        omegas = np.array([self.fadings[j].omega(z[j]) for j in range(self.n)])
        return self.base.gradient(arr) * omegas[None, :]


def smoothed_eval(model: SmoothedModel, p) -> np.ndarray:
    """Evaluate a smoothed map (module-level alias of ``model.evaluate``)."""
    return model.evaluate(p)


# ---------------------------------------------------------------------------
# combined certificate
# ---------------------------------------------------------------------------

@dataclass
class Corollary1Verdict:
    """Outcome of the two-part smoothed certificate.

    ``margin_alpha`` is the slack of ``max |Omega| <= alpha`` over all
    links (worst case over ``z >= z_floor``); ``margin_grad`` the sampled
    slack of ``alpha * |grad I(p)|_inf < q(p) / (1 + q(p))`` with ``q``
    taken from the cost gradient in the original power coordinates.
    Both must be positive for the certificate to hold.
    """

    holds: bool
    margin_alpha: float
    margin_grad: float
    alpha: float
    samples: int
    seed: int
    details: dict[str, Any]


def corollary1_check(model: SmoothedModel, cost: CostModel, box: PowerBox,
                     alpha: float, samples: int = 200, seed: int = 0) -> Corollary1Verdict:
    """Certify a smoothed problem via the fade bound ``alpha``.

    Holds when every link's worst ``|Omega|`` beyond the ratio floor is
    at most ``alpha`` and the sampled base-gradient norms scaled by
    ``alpha`` stay below ``q(p) / (1 + q(p))``.  Both margins are
    reported; a nonincreasing cost column makes the check inapplicable
    (margin_grad = -inf with the reason in ``details``).
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    per_link = [fad.max_abs_omega(model.z_floor) for fad in model.fadings]
    margin_alpha = alpha - max(per_link)
    rng = np.random.default_rng(seed)
    pts = box.sample_log_uniform(rng, size=samples)
    margin_grad = np.inf
    details: dict[str, Any] = {"per_link_max_abs_omega": per_link,
                               "z_floor": model.z_floor}
    for p in pts:
        try:
            q = gradient_ratio(cost_gradient(cost, p))
        except CostNotIncreasingError as exc:
            return Corollary1Verdict(False, margin_alpha, -np.inf, alpha,
                                     samples, seed, {**details, "reason": str(exc)})
        if q <= 0.0:
            return Corollary1Verdict(False, margin_alpha, -np.inf, alpha,
                                     samples, seed,
                                     {**details, "reason": "q(p) = 0: cost ratio gives no room"})
        margin_grad = min(margin_grad,
                          q / (1.0 + q) - alpha * norm_inf(model.base.gradient(p)))
    holds = bool(margin_alpha >= 0.0 and margin_grad > 0.0)
    return Corollary1Verdict(holds, float(margin_alpha), float(margin_grad),
                             alpha, samples, seed, details)
