"""Quadrotor target-pointing simulation on SE(3) with invariance-enforcing control."""

from .control import (
    Gains,
    GenericConstraintSet,
    LinearConstraint,
    control_invariance,
    control_stabilized,
    solve_invariance_generic,
    task_constraint_set,
    thrust_invariance,
    torques_invariance,
    transversality_matrix,
)
from .dynamics import ControlInput, RigidBodyState, VehicleParams, affine_fields, state_derivative
from .integrator import SimConfig, rk4_step, simulate
from .task import TaskSpec, on_manifold_init, perturb_vertical, pointing_frame, regularity, residuals, task_errors

__version__ = "0.1.0"

__all__ = [
    "ControlInput",
    "Gains",
    "GenericConstraintSet",
    "LinearConstraint",
    "RigidBodyState",
    "SimConfig",
    "TaskSpec",
    "VehicleParams",
    "affine_fields",
    "control_invariance",
    "control_stabilized",
    "on_manifold_init",
    "perturb_vertical",
    "pointing_frame",
    "regularity",
    "residuals",
    "rk4_step",
    "simulate",
    "solve_invariance_generic",
    "state_derivative",
    "task_constraint_set",
    "task_errors",
    "thrust_invariance",
    "torques_invariance",
    "transversality_matrix",
]
