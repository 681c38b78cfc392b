"""Reference curve families emitted as delimited data (and rendered plots).

Each ``figN`` function returns a ``(header, rows)`` pair on a fixed,
deterministic grid so repeated runs are byte-identical:

* fig1: smoothed value curves ``I -> I * T(I / b)`` for Rayleigh fades,
  against the hard cutoff they approximate;
* fig2: the smoothing derivative ``Omega(z)`` for Rayleigh fades (the
  curve for ``lam = sqrt(pi/2)`` peaks at exactly 1);
* fig3: the universal exponential profile ``psi`` (minimum at 1);
* fig4: worst-case ``|Omega|`` for exponential fades versus
  ``lam * z_min``, a two-peaked curve whose global peak bounds every
  exponential certificate.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .io import write_csv
from .smoothing import RayleighFading, psi, sigma_zmin, smoothed_value

__all__ = ["fig1", "fig2", "fig3", "fig4", "FIGURES", "figure_data",
           "emit_figure_data"]

_RAYLEIGH_LAMS = (0.8, float(np.sqrt(np.pi / 2.0)), 2.0)


def fig1(lams: tuple[float, ...] = _RAYLEIGH_LAMS, b: float = 1.0):
    """Smoothed value against raw interference, one column per fade width.

    The reference column ``hard`` is the discontinuous map the smoothing
    replaces: identity below the cutoff, zero above it.
    """
    grid = np.linspace(0.0, 4.0 * b, 401)
    header = ["I", "hard"] + [f"phi_lam_{lam:g}" for lam in lams]
    cols = [grid, np.where(grid <= b, grid, 0.0)]
    for lam in lams:
        cols.append(smoothed_value(RayleighFading(lam), b, grid))
    return header, np.column_stack(cols)


def fig2(lams: tuple[float, ...] = _RAYLEIGH_LAMS):
    """Rayleigh smoothing derivative ``Omega(z)`` per fade width.

    Log grid down to 1e-4 so each column's head approaches its supremum
    ``sqrt(pi/2) / lam``.
    """
    grid = np.exp(np.linspace(np.log(1e-4), np.log(6.0), 600))
    header = ["z"] + [f"omega_lam_{lam:g}" for lam in lams]
    cols = [grid] + [RayleighFading(lam).omega(grid) for lam in lams]
    return header, np.column_stack(cols)


def fig3():
    """The exponential profile ``psi(xi)``; the grid contains xi = 1
    exactly so the minimum lands on a sample."""
    grid = np.concatenate([np.linspace(0.02, 0.98, 49), [1.0],
                           np.linspace(1.02, 5.0, 200)])
    return ["xi", "psi"], np.column_stack([grid, psi(grid)])


def fig4():
    """Scale-free worst case for exponential fades.

    ``sigma_zmin(z_min, lam) * z_min`` depends only on ``u = lam * z_min``,
    so the curve is emitted in that variable (two local peaks; the right
    one is the global bound).  The grid is dense enough to place both
    peaks within one part in a thousand.
    """
    grid = np.exp(np.linspace(np.log(0.01), np.log(5.0), 3200))
    vals = np.array([sigma_zmin(1.0, u) for u in grid])
    return ["lambda_zmin", "sigma_zmin_times_zmin"], np.column_stack([grid, vals])


FIGURES = {"fig1": fig1, "fig2": fig2, "fig3": fig3, "fig4": fig4}


def figure_data(which: str, **params):
    """``(header, rows)`` for a named figure family."""
    if which not in FIGURES:
        raise ValueError(f"unknown figure {which!r}; expected one of {sorted(FIGURES)}")
    return FIGURES[which](**params)


def emit_figure_data(which: str, path, **params) -> Path:
    """Write one figure family's data as CSV to ``path`` and return it.

    ``params`` are forwarded to the family (``lams``, ``b`` where they
    apply); the grid is fixed, so identical calls produce identical bytes.
    """
    header, rows = figure_data(which, **params)
    path = Path(path)
    write_csv(path, header, rows)
    return path
