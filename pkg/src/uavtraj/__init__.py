"""Trajectory planning for an aerial base station over quadratic
traffic-intensity maps: closed-form single-region optima, an online
receding-horizon planner for multi-region maps, and an alternating
optimizer for the interface crossing of two-hot-spot maps, with a
direct-method oracle for independent verification."""

from .aoa import (
    AoaParams,
    AoaResult,
    CrossingState,
    aoa_optimize,
    compute_B_and_h,
    crossing_impulsions,
    hamiltonian_gap,
    total_crossing_cost,
)
from .closed_form import (
    ClosedFormTrajectory,
    CostBreakdown,
    action_closed_form,
    eval_position,
    eval_velocity,
    hamiltonian,
    impulsion,
    plan_single_phase,
)
from .core import BoundaryConditions, TimeWindow, Vec2, dot, norm, scale
from .kernels import BACKEND
from .mpc import MpcParams, SampledTrajectory, mpc_plan
from .oracle import (
    DiscreteTrajectory,
    direct_optimize,
    discrete_action,
    discretize,
    euler_lagrange_residual,
)
from .potential import (
    BiPhaseMap,
    Interface,
    QuadraticPhase,
    circle_interface,
    interface_gradient,
    interface_value,
    line_interface,
    make_biphase,
    make_equal_potential_interface,
    project_onto_interface,
    reduce_hotspots,
    traffic_intensity,
)
from .scenario import Scenario, emit_scenario, parse_scenario

__version__ = "0.1.0"

__all__ = [
    "AoaParams",
    "AoaResult",
    "BACKEND",
    "BiPhaseMap",
    "BoundaryConditions",
    "ClosedFormTrajectory",
    "CostBreakdown",
    "CrossingState",
    "DiscreteTrajectory",
    "Interface",
    "MpcParams",
    "QuadraticPhase",
    "SampledTrajectory",
    "Scenario",
    "TimeWindow",
    "Vec2",
    "action_closed_form",
    "aoa_optimize",
    "circle_interface",
    "compute_B_and_h",
    "crossing_impulsions",
    "direct_optimize",
    "discrete_action",
    "discretize",
    "dot",
    "emit_scenario",
    "eval_position",
    "eval_velocity",
    "euler_lagrange_residual",
    "hamiltonian",
    "hamiltonian_gap",
    "impulsion",
    "interface_gradient",
    "interface_value",
    "line_interface",
    "make_biphase",
    "make_equal_potential_interface",
    "mpc_plan",
    "norm",
    "parse_scenario",
    "plan_single_phase",
    "project_onto_interface",
    "reduce_hotspots",
    "scale",
    "total_crossing_cost",
    "traffic_intensity",
]
