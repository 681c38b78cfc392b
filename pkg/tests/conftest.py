"""Shared random-problem generators for the test suite.

Every generator takes an explicit seeded ``numpy.random.Generator`` so each
test pins its own stream.  Construction is inverse-first: draw the wanted
fixed point, then build the map that has it, so tests always know ground
truth exactly.
"""

import numpy as np

from flpower import (
    AffineModel,
    MonomialModel,
    NetworkScenario,
    PowerBox,
    SmoothedModel,
)
from flpower.smoothing import ExponentialFading, RayleighFading


def affine2_scenario():
    """Two symmetric links, 10 dB spreading-gain margin, matched noise."""
    return NetworkScenario(
        gains=np.array([[1.0, 0.1], [0.1, 1.0]]),
        tau=np.array([1.0, 1.0]),
        eta=np.array([0.1, 0.1]),
        box=PowerBox(np.array([1e-3, 1e-3]), np.array([10.0, 10.0])),
        name="affine2",
    )


def cells_between(grid, p, q):
    """Largest per-coordinate distance between p and q in grid cells."""
    worst = 0.0
    for i, (kind, step) in enumerate(grid.cell_steps()):
        if kind == "mul":
            d = abs(np.log(p[i] / q[i])) / np.log(step)
        else:
            d = abs(p[i] - q[i]) / step
        worst = max(worst, d)
    return worst


def random_affine_scenario(rng, n, coupling=0.25):
    """An n-link ratio-target scenario with a known interior fixed point.

    The coupling matrix gets row sums at most ``coupling`` and the fixed
    point lands in [0.8, 1.2]^n, so the noise offsets stay above 0.5 and
    the point sits well inside the returned box.  Returns the scenario;
    its box is [p*/4, 4 p*] and ``affine_fixed_point`` equals the target
    by construction.
    """
    target = rng.uniform(0.8, 1.2, size=n)
    F = rng.uniform(0.2, 1.0, size=(n, n))
    np.fill_diagonal(F, 0.0)
    scale = coupling * rng.uniform(0.3, 1.0, size=n) / np.maximum(F.sum(axis=1), 1e-12)
    F = F * scale[:, None]
    u = target - F @ target
    tau = rng.uniform(0.5, 2.0, size=n)
    gains = F / tau[:, None]
    np.fill_diagonal(gains, 1.0)
    box = PowerBox(target / 4.0, target * 4.0)
    return NetworkScenario(gains=gains, tau=tau, eta=u / tau, box=box), target


def random_monomial_t2(rng, n, coupling=0.5):
    """A decreasing power-product map with known fixed point near 1.

    Exponent rows have magnitude sums at most ``coupling`` (< 1), which
    bounds the coupling spectral radius away from 1.  Returns the model,
    a box [p*/4, 4 p*] and the fixed point p*.
    """
    mag = rng.uniform(0.2, 1.0, size=(n, n))
    np.fill_diagonal(mag, 0.0)
    scale = coupling * rng.uniform(0.5, 1.0, size=n) / np.maximum(mag.sum(axis=1), 1e-12)
    A = -mag * scale[:, None]
    x_star = rng.uniform(-0.2, 0.2, size=n)
    b = x_star - A @ x_star
    p_star = np.exp(x_star)
    return MonomialModel(A=A, b=b), PowerBox(p_star / 4.0, p_star * 4.0), p_star


def random_smoothed_problem(rng, n):
    """A fading-averaged model over a random affine base.

    Interference over the base box stays above 0.5 while caps stay below
    2, keeping ratio arguments well above the small-ratio floor.
    """
    scenario, _ = random_affine_scenario(rng, n)
    fadings = []
    for _ in range(n):
        lam = float(rng.uniform(0.5, 3.0))
        fadings.append(RayleighFading(lam) if rng.uniform() < 0.5
                       else ExponentialFading(lam))
    b = rng.uniform(0.5, 2.0, size=n)
    return SmoothedModel(AffineModel(scenario), fadings, b=b), scenario.box


def grid_points_for(n):
    """Points per dimension that keep n-dimensional grids near 10^6 cells."""
    return {1: 2000, 2: 60, 3: 40, 4: 17, 5: 12, 6: 10}[n]
