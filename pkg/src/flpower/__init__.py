"""Power control by fixed-point iteration with optimality certificates.

The package solves per-link power allocation problems of the form
"every link meets its quality target at least cost" by iterating the
interference map, and certifies through sampled gradient conditions
that the resulting fixed point is the problem's unique optimum, also
under asynchronous updates and random channel fading.
"""

__version__ = "0.1.0"

from .model import (
    PowerBox,
    NetworkScenario,
    CostModel,
    affine_interference,
    cost_eval,
    cost_gradient,
    norm_inf,
    norm_one,
    spectral_radius,
)
from .interference import (
    InterferenceModel,
    AffineModel,
    MonomialModel,
    OpportunisticModel,
    ConstantModel,
    CustomModel,
    ClassificationVerdict,
    interference_gradient,
    classify_standard,
    classify_type2,
    classify_two_sided,
)
from .logdomain import (
    LogProblem,
    to_log_problem,
    check_shrinking,
    check_grad_norm1,
)
from .qualifiers import (
    ConditionEntry,
    QualificationReport,
    BBound,
    CostNotIncreasingError,
    q_ratio,
    b_bound,
    check_Q1,
    check_Q2,
    check_Qinf,
    check_Qk,
    check_Qt2,
    construct_t2_cost,
    qualify_all,
)
from .solver import (
    IterationTrace,
    DelaySchedule,
    solve_sync,
    solve_async,
    fixed_point_residual,
)
from .smoothing import (
    FadingModel,
    RayleighFading,
    ExponentialFading,
    CustomFading,
    SmoothedModel,
    SmallRatioWarning,
    smoothed_eval,
    smoothed_value,
    omega,
    psi,
    xi1,
    sigma_zmin,
    sigma_stationary_points,
    rayleigh_max_abs_omega,
    corollary1_check,
    Corollary1Verdict,
)
from .oracle import (
    InfeasibleError,
    GridSpec,
    GridOptimum,
    affine_fixed_point,
    grid_pareto_optimum,
    cell_cost_variation,
    fd_gradient,
)
from .scenarios import (
    ScenarioFormatError,
    LoadedScenario,
    load_scenario,
    save_scenario,
    bundled_scenarios,
    load_bundled,
)
from .figures import figure_data, emit_figure_data

__all__ = [
    "__version__",
    "PowerBox", "NetworkScenario", "CostModel", "affine_interference",
    "cost_eval", "cost_gradient", "norm_inf", "norm_one", "spectral_radius",
    "InterferenceModel", "AffineModel", "MonomialModel", "OpportunisticModel",
    "ConstantModel", "CustomModel", "ClassificationVerdict",
    "interference_gradient", "classify_standard", "classify_type2",
    "classify_two_sided",
    "LogProblem", "to_log_problem", "check_shrinking", "check_grad_norm1",
    "ConditionEntry", "QualificationReport", "BBound", "CostNotIncreasingError",
    "q_ratio", "b_bound", "check_Q1", "check_Q2", "check_Qinf", "check_Qk",
    "check_Qt2", "construct_t2_cost", "qualify_all",
    "IterationTrace", "DelaySchedule", "solve_sync", "solve_async",
    "fixed_point_residual",
    "FadingModel", "RayleighFading", "ExponentialFading", "CustomFading",
    "SmoothedModel", "SmallRatioWarning", "smoothed_eval", "smoothed_value",
    "omega", "psi", "xi1", "sigma_zmin", "sigma_stationary_points",
    "rayleigh_max_abs_omega", "corollary1_check", "Corollary1Verdict",
    "InfeasibleError", "GridSpec", "GridOptimum", "affine_fixed_point",
    "grid_pareto_optimum", "cell_cost_variation", "fd_gradient",
    "ScenarioFormatError", "LoadedScenario", "load_scenario", "save_scenario",
    "bundled_scenarios", "load_bundled",
    "figure_data", "emit_figure_data",
]
