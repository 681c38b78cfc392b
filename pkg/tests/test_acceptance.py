"""Acceptance suite: one test per release criterion, in order.

Each test states its tolerance inline and fails with the worst observed
value, so a red line here names the criterion that broke.
"""

import math
import time
from pathlib import Path

import numpy as np

from flpower import (
    AffineModel,
    CostModel,
    GridSpec,
    affine_fixed_point,
    grid_pareto_optimum,
    load_bundled,
    solve_async,
    solve_sync,
    to_log_problem,
)
from flpower.logdomain import check_grad_norm1, check_shrinking
from flpower.figures import emit_figure_data, figure_data
from flpower.model import norm_inf, spectral_radius
from flpower.oracle import fd_gradient
from flpower.qualifiers import (
    b_bound,
    check_Q1,
    check_Qk,
    check_Qt2,
    construct_t2_cost,
    q_ratio,
)
from flpower.smoothing import (
    RayleighFading,
    rayleigh_max_abs_omega,
    sigma_stationary_points,
    sigma_zmin,
)
from flpower.solver import DelaySchedule

from conftest import (
    cells_between,
    grid_points_for,
    random_affine_scenario,
    random_monomial_t2,
    random_smoothed_problem,
)

GOLDEN_DIR = Path(__file__).parent / "goldens"

BUNDLED = ("affine2", "affine3", "constant2", "monomial_t2",
           "opportunistic2", "smoothed_rayleigh2")
TWO_SIDED = ("affine2", "affine3", "constant2", "monomial_t2", "opportunistic2")


def _log_problem(name):
    sc = load_bundled(name)
    return to_log_problem(sc.model, sc.cost, sc.box)


def test_criterion_1_affine_solver_matches_closed_form_and_grid():
    start = time.monotonic()
    for k in range(10):
        n = 2 + (k % 5)
        rng = np.random.default_rng(k)
        scenario, _ = random_affine_scenario(rng, n)
        assert spectral_radius(scenario.coupling_matrix()) < 1.0
        star = affine_fixed_point(scenario)
        trace = solve_sync(AffineModel(scenario), scenario.box.p_min, tol=1e-12)
        rel = np.max(np.abs(trace.final - star)) / np.max(np.abs(star))
        assert trace.converged
        assert rel <= 1e-8, f"scenario {k}: relative error {rel:.3e}"
        grid = GridSpec(scenario.box, points_per_dim=grid_points_for(n))
        opt = grid_pareto_optimum(AffineModel(scenario), CostModel(kind="sum"),
                                  grid)
        cells = cells_between(grid, opt.point, star)
        assert cells <= 1.0 + 1e-9, f"scenario {k}: {cells:.3f} cells off"
    assert time.monotonic() - start < 10.0


def test_criterion_2_two_sided_maps_shrink_in_log_coordinates():
    for name in TWO_SIDED:
        lp = _log_problem(name)
        for seed in range(5):
            shrink = check_shrinking(lp, pairs=1000, seed=seed)
            assert shrink.holds, (
                f"{name} seed {seed}: max ratio {shrink.max_ratio:.6f}")
            gnorm = check_grad_norm1(lp, samples=1000, seed=seed)
            assert gnorm.holds, (
                f"{name} seed {seed}: max column sum {gnorm.max_norm1:.6f}")


def test_criterion_3_rayleigh_kernel_constants():
    fading = RayleighFading(1.0)
    # Omega(z) - sqrt(pi/2) is O(z), so the probe point caps the error
    assert abs(float(fading.omega(1e-9)) - math.sqrt(math.pi / 2.0)) <= 1e-8
    assert abs(float(fading.omega(1e-9)) - 1.2533) <= 1e-3
    assert abs(float(fading.omega(math.sqrt(2.0))) - (-0.323)) <= 1e-3
    assert abs(rayleigh_max_abs_omega(math.sqrt(math.pi / 2.0)) - 1.0) <= 1e-4


def test_criterion_4_exponential_kernel_peaks_and_global_bound():
    start = time.monotonic()
    v1, v2 = sigma_stationary_points()
    assert abs(v1 - 0.1184) <= 1e-3
    assert abs(v2 - 1.5656) <= 1e-3
    for z_min in (1.0, 0.5):
        lams = np.exp(np.linspace(np.log(0.01 / z_min), np.log(20.0 / z_min),
                                  2000))
        vals = np.array([sigma_zmin(z_min, lam) for lam in lams])
        peaks = [k for k in range(1, len(vals) - 1)
                 if vals[k] > vals[k - 1] and vals[k] > vals[k + 1]]
        assert len(peaks) == 2, f"z_min={z_min}: {len(peaks)} peaks"
        assert abs(vals[peaks[0]] - 0.093 / z_min) <= 2e-3 / z_min
        assert abs(vals[peaks[1]] - 0.185 / z_min) <= 2e-3 / z_min
        assert np.max(vals) <= 0.185 / z_min + 1e-3 / z_min
    assert time.monotonic() - start < 2.0


def test_criterion_5_smoothed_gradient_bounded_by_kernel_magnitude():
    for k in range(50):
        n = 2 + (k % 3)
        rng = np.random.default_rng(5000 + k)
        model, box = random_smoothed_problem(rng, n)
        for p in box.sample_log_uniform(rng, 100):
            fd = fd_gradient(model.evaluate, p, step=1e-6)
            base_vals = model.base.evaluate(p)
            omegas = [float(model.fadings[i].omega(base_vals[i] / model.b[i]))
                      for i in range(n)]
            bound = max(abs(w) for w in omegas) * norm_inf(model.base.gradient(p))
            assert norm_inf(fd) <= bound + 1e-6, (
                f"problem {k}: |grad| {norm_inf(fd):.6f} > bound {bound:.6f}")


def test_criterion_6_constructed_costs_certify_type2_problems():
    odd_ppd = {2: 61, 3: 41, 4: 17}
    for seed in range(20):
        n = 2 + (seed % 3)
        rng = np.random.default_rng(1000 + seed)
        model, box, p_star = random_monomial_t2(rng, n)
        assert spectral_radius(np.abs(model.A)) < 1.0
        c = rng.uniform(0.5, 1.5, size=n)
        cost = construct_t2_cost(np.abs(model.A).T, c)
        lp = to_log_problem(model, cost, box)
        bb = b_bound(lp, samples=200, seed=seed)
        s = np.asarray(cost.s)
        assert np.max(np.abs((np.eye(n) - bb.B) @ s - c)) <= 1e-10
        assert np.min(s) > 0.0
        entry = check_Qt2(lp, c=c, samples=200, seed=seed)
        assert entry.verdict == "holds", f"seed {seed}: {entry.verdict}"
        trace = solve_sync(model, box.p_min, tol=1e-12)
        assert np.max(np.abs(trace.final - p_star)) <= 1e-9
        grid = GridSpec(box, points_per_dim=odd_ppd[n])
        opt = grid_pareto_optimum(model, cost, grid)
        cells = cells_between(grid, opt.point, p_star)
        assert cells <= 1.0 + 1e-9, f"seed {seed}: {cells:.3f} cells off"


def test_criterion_7_async_iteration_reaches_the_sync_fixed_point():
    contractive = tuple(
        name for name in BUNDLED
        if check_grad_norm1(_log_problem(name), samples=400, seed=0).holds)
    assert contractive == TWO_SIDED
    tol = 1e-10
    for name in contractive:
        sc = load_bundled(name)
        star = solve_sync(sc.model, sc.box.p_min, tol=tol).final
        for max_delay in (1, 3, 10):
            for seed in range(5):
                schedule = DelaySchedule(n=sc.model.n, max_delay=max_delay,
                                         seed=seed)
                trace = solve_async(sc.model, sc.box.p_min, schedule, tol=tol,
                                    box=sc.box)
                gap = float(np.max(np.abs(trace.final - star)))
                assert gap <= 10.0 * tol, (
                    f"{name} D={max_delay} seed {seed}: gap {gap:.3e}")


def test_criterion_8_first_order_conditions_are_coherent():
    for name in BUNDLED:
        lp = _log_problem(name)
        q1 = check_Q1(lp, samples=300, seed=0)
        qk = check_Qk(lp, k=1, samples=300, seed=0)
        assert q1.verdict == qk.verdict, name
        if q1.margin is None:
            assert qk.margin is None, name
        else:
            assert q1.margin == qk.margin, (
                f"{name}: Q1 margin {q1.margin} != Qk(1) margin {qk.margin}")
        # the relaxed threshold q/(1+q) never exceeds 1/2 for q <= 1
        rng = np.random.default_rng(8)
        for p in lp.box.sample_log_uniform(rng, 200):
            try:
                q = q_ratio(lp, np.log(p))
            except ValueError:
                continue
            if q <= 1.0:
                assert q / (1.0 + q) <= 0.5 + 1e-15


def test_criterion_9_figure_data_matches_goldens(tmp_path):
    for name in ("fig2", "fig3", "fig4"):
        first = emit_figure_data(name, tmp_path / f"{name}_a.csv").read_bytes()
        second = emit_figure_data(name, tmp_path / f"{name}_b.csv").read_bytes()
        assert first == second, f"{name}: rerun changed bytes"
        golden = (GOLDEN_DIR / f"{name}.csv").read_bytes()
        assert first == golden, f"{name}: output differs from golden CSV"

    header, rows = figure_data("fig2")
    rows = np.asarray(rows)
    col = header.index("omega_lam_1.25331")
    assert abs(np.max(np.abs(rows[:, col])) - 1.0) <= 1e-3

    header, rows = figure_data("fig3")
    rows = np.asarray(rows)
    i = int(np.argmin(rows[:, 1]))
    assert rows[i, 0] == 1.0

    header, rows = figure_data("fig4")
    rows = np.asarray(rows)
    v = rows[:, 1]
    peaks = [k for k in range(1, len(v) - 1)
             if v[k] > v[k - 1] and v[k] > v[k + 1]]
    assert len(peaks) == 2
    assert abs(v[peaks[0]] - 0.093) <= 2e-3
    assert abs(v[peaks[1]] - 0.185) <= 2e-3
