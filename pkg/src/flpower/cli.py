"""Command-line interface.

Subcommands: ``solve`` (run the fixed-point iteration), ``qualify``
(optimality certificates), ``classify`` (structural class checks),
``verify`` (cross-check against closed form and grid search), ``smooth``
(fade analysis curves) and ``figures`` (reference curve families).

Every run writes its delimited/JSON outputs plus a ``manifest.json``
into the output directory (``--out``, defaulting to the
``FLPOWER_OUTDIR`` environment variable or ``./flpower-out``).  Reruns
with the same configuration reproduce every file byte for byte.  Report
paths also render matplotlib figures next to the delimited data unless
``--no-plot`` is given.

Exit codes: 0 success, 1 infeasibility / non-convergence / failed
verification, 2 invalid input.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .interference import classify_standard, classify_two_sided, classify_type2
from .io import write_csv, write_json, write_manifest
from .figures import FIGURES, emit_figure_data, figure_data
from .logdomain import check_grad_norm1, check_shrinking, to_log_problem
from .oracle import (
    GridSpec,
    InfeasibleError,
    affine_fixed_point,
    cell_cost_variation,
    grid_pareto_optimum,
)
from .plots import save_curve_figure, save_trace_figure
from .qualifiers import qualify_all
from .scenarios import ScenarioFormatError, load_scenario
from .smoothing import (
    ExponentialFading,
    RayleighFading,
    psi,
    rayleigh_max_abs_omega,
    sigma_stationary_points,
    sigma_zmin,
    xi1,
)
from .solver import DelaySchedule, solve_async, solve_sync

__all__ = ["main", "RunConfig"]


@dataclass
class RunConfig:
    """Resolved options of one CLI run (what the manifest records)."""

    command: str
    options: dict[str, Any] = field(default_factory=dict)

    def as_dict(self) -> dict[str, Any]:
        return {"command": self.command, **self.options}


def _outdir(args) -> Path:
    out = Path(args.out) if args.out else Path(os.environ.get("FLPOWER_OUTDIR",
                                                              "flpower-out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config(args, skip=("func", "out")) -> RunConfig:
    options = {k: v for k, v in vars(args).items()
               if k not in skip and not callable(v)}
    for k, v in options.items():
        if isinstance(v, Path):
            options[k] = str(v)
    return RunConfig(command=args.command, options=options)


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------

def _cmd_solve(args) -> int:
    loaded = load_scenario(args.scenario)
    out = _outdir(args)
    p0 = np.asarray(args.p0, dtype=float) if args.p0 else loaded.box.p_min.copy()
    if args.mode == "async":
        schedule = DelaySchedule(n=loaded.model.n, max_delay=args.max_delay,
                                 seed=args.schedule_seed)
        trace = solve_async(loaded.model, p0, schedule, tol=args.tol,
                            max_iters=args.max_iters, box=loaded.box)
    else:
        trace = solve_sync(loaded.model, p0, tol=args.tol, max_iters=args.max_iters,
                           box=loaded.box, project=args.project)
    outputs = []
    header = trace.header()
    rows = list(trace.rows())
    outputs.append(write_csv(out / "trace.csv", header, rows).name)
    outputs.append(write_json(out / "solution.json", {
        "scenario": loaded.name,
        "verdict": trace.verdict,
        "iterations": trace.iterations,
        "final": trace.final,
        "residual": float(trace.residuals[-1]),
        "settings": trace.settings,
    }).name)
    if not args.no_plot:
        outputs.append(save_trace_figure(out / "trace.png", header, np.asarray(
            [[float(v) for v in r] for r in rows]), title=loaded.name).name)
    write_manifest(out, "solve", _config(args).as_dict(), outputs)
    print(f"{loaded.name}: {trace.verdict} after {trace.iterations} iterations, "
          f"residual {trace.residuals[-1]:.3e}")
    print("final power:", np.array2string(trace.final, precision=10))
    return 0 if trace.converged else 1


# ---------------------------------------------------------------------------
# qualify
# ---------------------------------------------------------------------------

def _cmd_qualify(args) -> int:
    loaded = load_scenario(args.scenario)
    out = _outdir(args)
    lp = to_log_problem(loaded.model, loaded.cost, loaded.box)
    c = np.asarray(args.c, dtype=float) if args.c else None
    report = qualify_all(lp, samples=args.samples, seed=args.seed,
                         norm=args.norm, c=c)
    payload = {
        "scenario": loaded.name,
        "certified": report.certified,
        "entries": [{
            "condition": e.condition,
            "verdict": e.verdict,
            "margin": e.margin,
            "samples": e.samples,
            "seed": e.seed,
            "witness": e.witness,
            "details": e.details,
        } for e in report.entries],
    }
    outputs = [write_json(out / "qualification.json", payload).name]
    write_manifest(out, "qualify", _config(args).as_dict(), outputs)
    print(f"scenario: {loaded.name}")
    print(report.table())
    return 0


# ---------------------------------------------------------------------------
# classify
# ---------------------------------------------------------------------------

def _cmd_classify(args) -> int:
    loaded = load_scenario(args.scenario)
    out = _outdir(args)
    verdicts = {
        "standard": classify_standard(loaded.model, loaded.box,
                                      samples=args.samples, seed=args.seed),
        "type-II": classify_type2(loaded.model, loaded.box,
                                  samples=args.samples, seed=args.seed),
        "two-sided": classify_two_sided(loaded.model, loaded.box,
                                        samples=args.samples, seed=args.seed),
    }
    lp = to_log_problem(loaded.model, loaded.cost, loaded.box)
    shrink = check_shrinking(lp, pairs=args.samples, seed=args.seed)
    gnorm = check_grad_norm1(lp, samples=args.samples, seed=args.seed)
    payload = {
        "scenario": loaded.name,
        "declared": loaded.model.class_tag,
        "classes": {k: {"holds": v.holds, "property": v.property,
                        "witness": v.witness, "samples": v.samples, "seed": v.seed}
                    for k, v in verdicts.items()},
        "log_shrinking": {"holds": shrink.holds, "max_ratio": shrink.max_ratio,
                          "pairs": shrink.pairs, "seed": shrink.seed},
        "log_grad_norm1": {"holds": gnorm.holds, "max_norm1": gnorm.max_norm1,
                           "samples": gnorm.samples, "seed": gnorm.seed},
    }
    outputs = [write_json(out / "classification.json", payload).name]
    write_manifest(out, "classify", _config(args).as_dict(), outputs)
    print(f"scenario: {loaded.name} (declared {loaded.model.class_tag})")
    for v in verdicts.values():
        print("  " + v.describe())
    print(f"  log-domain shrinking: max ratio {shrink.max_ratio:.6g} "
          f"({'holds' if shrink.holds else 'violated'})")
    print(f"  log-domain column sums: max {gnorm.max_norm1:.6g} "
          f"({'holds' if gnorm.holds else 'violated'})")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _cmd_verify(args) -> int:
    loaded = load_scenario(args.scenario)
    out = _outdir(args)
    trace = solve_sync(loaded.model, loaded.box.p_min, tol=args.tol)
    result: dict[str, Any] = {"scenario": loaded.name, "verdict": trace.verdict,
                              "solver_final": trace.final,
                              "solver_residual": float(trace.residuals[-1])}
    ok = trace.converged
    if loaded.scenario is not None and type(loaded.model).__name__ == "AffineModel":
        star = affine_fixed_point(loaded.scenario)
        rel = float(np.max(np.abs(trace.final - star)) / max(np.max(np.abs(star)), 1e-300))
        result["closed_form"] = star
        result["closed_form_rel_err"] = rel
        result["closed_form_ok"] = rel <= 1e-8
        ok = ok and rel <= 1e-8
    grid = GridSpec(loaded.box, points_per_dim=args.points_per_dim)
    scalar = loaded.cost.output_dim(loaded.model.n) == 1
    if scalar:
        opt = grid_pareto_optimum(loaded.model, loaded.cost, grid)
        from .model import cost_eval  # local import keeps module top tidy
        fp_cost = float(cost_eval(loaded.cost, trace.final)[0])
        tol_cell = cell_cost_variation(loaded.cost, grid, opt.point)
        diff = abs(fp_cost - float(opt.value))
        result["grid_point"] = opt.point
        result["grid_value"] = opt.value
        result["fixed_point_cost"] = fp_cost
        result["one_cell_cost_variation"] = tol_cell
        result["grid_ok"] = bool(diff <= tol_cell)
        ok = ok and result["grid_ok"]
    outputs = [write_json(out / "verify.json", result).name]
    write_manifest(out, "verify", _config(args).as_dict(), outputs)
    print(f"{loaded.name}: solver {trace.verdict}, "
          f"final {np.array2string(trace.final, precision=8)}")
    if "closed_form_rel_err" in result:
        print(f"  closed form rel err: {result['closed_form_rel_err']:.3e} "
              f"({'ok' if result['closed_form_ok'] else 'MISMATCH'})")
    if scalar:
        print(f"  grid optimum cost {result['grid_value']:.10g} vs fixed point "
              f"{result['fixed_point_cost']:.10g} "
              f"(cell tolerance {result['one_cell_cost_variation']:.3g}; "
              f"{'ok' if result['grid_ok'] else 'MISMATCH'})")
    return 0 if ok else 1


# ---------------------------------------------------------------------------
# smooth
# ---------------------------------------------------------------------------

def _smooth_curve(args):
    if args.emit == "psi-curve":
        grid = np.concatenate([np.linspace(0.02, 0.98, 49), [1.0],
                               np.linspace(1.02, 5.0, 200)])
        return ["xi", "psi"], np.column_stack([grid, psi(grid)]), False
    fading = (RayleighFading(args.lam) if args.fading == "rayleigh"
              else ExponentialFading(args.lam))
    if args.emit == "omega-curve":
        upper = max(6.0 * args.lam, 10.0 * args.zmin)
        grid = np.exp(np.linspace(np.log(args.zmin), np.log(upper), 500))
        return ["z", "omega"], np.column_stack([grid, fading.omega(grid)]), True
    # sigma-curve: worst |Omega| beyond zmin as the fade width sweeps
    lams = np.exp(np.linspace(np.log(0.01 / args.zmin), np.log(5.0 / args.zmin), 500))
    if args.fading == "rayleigh":
        vals = np.array([RayleighFading(l).max_abs_omega(args.zmin) for l in lams])
    else:
        vals = np.array([sigma_zmin(args.zmin, l) for l in lams])
    return ["lambda", "sigma_zmin"], np.column_stack([lams, vals]), True


def _cmd_smooth(args) -> int:
    out = _outdir(args)
    header, rows, logx = _smooth_curve(args)
    name = args.emit.replace("-", "_")
    outputs = [write_csv(out / f"{name}.csv", header, rows).name]
    summary: dict[str, Any] = {"fading": args.fading, "lam": args.lam,
                               "zmin": args.zmin, "emit": args.emit}
    if args.fading == "rayleigh":
        summary["max_abs_omega_global"] = rayleigh_max_abs_omega(args.lam)
        summary["max_abs_omega_zmin"] = RayleighFading(args.lam).max_abs_omega(args.zmin)
    else:
        v1, v2 = sigma_stationary_points()
        summary.update({
            "xi1": xi1(),
            "psi_at_1": float(psi(1.0)),
            "sigma_zmin": sigma_zmin(args.zmin, args.lam),
            "stationary_points": [v1, v2],
            "global_bound_times_zmin": float(v2 * -psi(v2)),
        })
    if args.alpha is not None:
        worst = summary.get("max_abs_omega_zmin", summary.get("sigma_zmin"))
        summary["alpha"] = args.alpha
        summary["alpha_margin"] = float(args.alpha - worst)
        summary["alpha_ok"] = bool(worst <= args.alpha)
    outputs.append(write_json(out / "smooth.json", summary).name)
    if not args.no_plot:
        outputs.append(save_curve_figure(out / f"{name}.png", header, rows,
                                         title=f"{args.emit} ({args.fading}, "
                                               f"lam={args.lam:g})",
                                         logx=logx).name)
    write_manifest(out, "smooth", _config(args).as_dict(), outputs)
    for key in ("max_abs_omega_zmin", "sigma_zmin", "alpha_margin"):
        if key in summary:
            print(f"{key}: {summary[key]:.6g}")
    print(f"wrote {', '.join(sorted(outputs))} to {out}")
    return 0


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

def _cmd_figures(args) -> int:
    out = _outdir(args)
    which = sorted(FIGURES) if args.which == "all" else [args.which]
    outputs = []
    for name in which:
        outputs.append(emit_figure_data(name, out / f"{name}.csv").name)
        if not args.no_plot:
            header, rows = figure_data(name)
            logx = name in ("fig2", "fig4")
            outputs.append(save_curve_figure(out / f"{name}.png", header, rows,
                                             title=name, logx=logx).name)
    write_manifest(out, "figures", _config(args).as_dict(), outputs)
    print(f"wrote {', '.join(sorted(outputs))} to {out}")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flpower",
        description="Fixed-point power control with optimality certificates.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default=None,
                       help="output directory (default: $FLPOWER_OUTDIR or ./flpower-out)")

    p = sub.add_parser("solve", help="iterate the interference map to its fixed point")
    p.add_argument("scenario", type=Path)
    p.add_argument("--p0", type=float, nargs="+", default=None,
                   help="starting power (default: box lower corner)")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--mode", choices=("sync", "async"), default="sync")
    p.add_argument("--max-delay", type=int, default=0,
                   help="bound on stale reads in async mode")
    p.add_argument("--schedule-seed", type=int, default=0)
    p.add_argument("--project", action="store_true",
                   help="clamp iterates into the power box")
    p.add_argument("--no-plot", action="store_true")
    add_common(p)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("qualify", help="evaluate the optimality certificates")
    p.add_argument("scenario", type=Path)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--norm", choices=("inf", "one"), default="inf")
    p.add_argument("--c", type=float, nargs="+", default=None,
                   help="positive vector for the type-II certificate")
    add_common(p)
    p.set_defaults(func=_cmd_qualify)

    p = sub.add_parser("classify", help="sample the structural class of the map")
    p.add_argument("scenario", type=Path)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    add_common(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("verify", help="cross-check the solver against slow oracles")
    p.add_argument("scenario", type=Path)
    p.add_argument("--points-per-dim", type=int, default=60)
    p.add_argument("--tol", type=float, default=1e-10)
    add_common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("smooth", help="fade-smoothing analysis curves")
    p.add_argument("--fading", choices=("rayleigh", "exponential"), default="rayleigh")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0,
                   help="fade scale parameter")
    p.add_argument("--zmin", type=float, default=1e-3,
                   help="smallest trusted interference-to-cutoff ratio")
    p.add_argument("--alpha", type=float, default=None,
                   help="check the worst |Omega| against this bound")
    p.add_argument("--emit", choices=("omega-curve", "sigma-curve", "psi-curve"),
                   default="omega-curve")
    p.add_argument("--no-plot", action="store_true")
    add_common(p)
    p.set_defaults(func=_cmd_smooth)

    p = sub.add_parser("figures", help="emit the reference curve families")
    p.add_argument("which", choices=sorted(FIGURES) + ["all"])
    p.add_argument("--no-plot", action="store_true")
    add_common(p)
    p.set_defaults(func=_cmd_figures)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleError as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
