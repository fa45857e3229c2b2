"""Invariance-enforcing and residual-stabilizing feedback for the pointing task.

Three laws are provided for the inputs ``(f, tau2, tau3)`` with ``tau1 = 0``:

* :func:`thrust_invariance` / :func:`torques_invariance`: closed-form laws
  that keep the task distribution invariant from compatible initial states.
* :func:`control_stabilized`: solves ``mu' = -k mu`` exactly for the three
  residuals anywhere in the feasible set.
* :func:`solve_invariance_generic`: assembles and solves the linear system
  ``G + M u = -k mu`` for any set of constraints that are linear in
  ``xi = (Omega, v)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .dynamics import ControlInput, RigidBodyState, VehicleParams, affine_fields
from .errors import DimensionMismatch, SingularAttitude, SingularSystem, TargetCollision
from .se3 import E2, E3, cross, hat, project_to_so3
from .task import TaskSpec, relative_position

DEFAULT_MAX_COND = 1e4
DEFAULT_FD_STEP = 1e-6

INPUT_NAMES = ("f", "tau1", "tau2", "tau3")


@dataclass(frozen=True)
class Gains:
    k_z: float = 0.0
    k_O3: float = 0.0
    k_O2: float = 0.0

    def __post_init__(self):
        for name in ("k_z", "k_O3", "k_O2"):
            k = getattr(self, name)
            if not (math.isfinite(k) and k >= 0.0):
                raise ValueError(f"gain {name} must be non-negative, got {k}")

    def as_array(self) -> np.ndarray:
        return np.array([self.k_z, self.k_O3, self.k_O2])


def _thrust_axis_component(s: RigidBodyState, spec: TaskSpec) -> float:
    s3 = float(s.R[2, 2])
    if abs(s3) < spec.eps_s:
        raise SingularAttitude(f"|e3^T b3| = {abs(s3):.3g} below eps_s = {spec.eps_s}")
    return s3


def _body_terms(s: RigidBodyState, spec: TaskSpec):
    """Scalars shared by the laws: ``s2, s3, rho, rho', (v1, v2, v3), Omega``."""
    (r11, r12, r13), (r21, r22, r23), (r31, r32, s3) = s.R.tolist()
    if abs(s3) < spec.eps_s:
        raise SingularAttitude(f"|e3^T b3| = {abs(s3):.3g} below eps_s = {spec.eps_s}")
    px, py, pz = s.p.tolist()
    tx, ty, tz = spec.target.tolist()
    qx, qy, qz = px - tx, py - ty, pz - tz
    rho = math.sqrt(qx * qx + qy * qy + qz * qz)
    if not rho >= spec.eps_rho:
        raise TargetCollision(f"distance to target {rho:.3g} below eps_rho = {spec.eps_rho}")
    vx, vy, vz = s.v.tolist()
    v1 = r11 * vx + r21 * vy + r31 * vz
    v2 = r12 * vx + r22 * vy + r32 * vz
    v3 = r13 * vx + r23 * vy + s3 * vz
    rho_dot = (qx * vx + qy * vy + qz * vz) / rho
    return r32, s3, rho, rho_dot, (v1, v2, v3), s.omega.tolist()


def thrust_invariance(s: RigidBodyState, params: VehicleParams, spec: TaskSpec) -> float:
    """``f = m g / (e3^T R e3)``: holds the vertical acceleration at zero."""
    return params.m * params.g / _thrust_axis_component(s, spec)


def torques_invariance(
    s: RigidBodyState, params: VehicleParams, spec: TaskSpec
) -> tuple[float, float]:
    """Closed-form ``(tau2, tau3)`` keeping ``b1 = -p_hat`` invariant.

    Valid on compatible states (``b1 = -p_hat`` and zero residuals), where
    ``rho' = -v1`` and ``v2 = -rho Omega_3``, ``v3 = rho Omega_2``:

        Omega_2' = Omega_1 Omega_3 + 2 Omega_2 v1 / rho + (f/m - g s3) / rho
        Omega_3' = -Omega_1 Omega_2 + 2 Omega_3 v1 / rho + g s2 / rho

    and Euler's equations convert the accelerations to torques.
    """
    return _invariance_law(params, *_body_terms(s, spec))[1:]


def _invariance_law(params, s2, s3, rho, rho_dot, vb, omega):
    v1 = vb[0]
    o1, o2, o3 = omega
    J1, J2, J3 = params.J1, params.J2, params.J3
    g = params.g
    f_over_m = g / s3
    dO2 = o1 * o3 + 2.0 * o2 * v1 / rho + (f_over_m - g * s3) / rho
    dO3 = -o1 * o2 + 2.0 * o3 * v1 / rho + g * s2 / rho
    tau2 = J2 * dO2 + (J1 - J3) * o1 * o3
    tau3 = J3 * dO3 + (J2 - J1) * o1 * o2
    return params.m * g / s3, tau2, tau3


def control_invariance(s: RigidBodyState, params: VehicleParams, spec: TaskSpec) -> ControlInput:
    f, tau2, tau3 = _invariance_law(params, *_body_terms(s, spec))
    return ControlInput(f=f, tau1=0.0, tau2=tau2, tau3=tau3)


def control_stabilized(
    s: RigidBodyState, params: VehicleParams, spec: TaskSpec, gains: Gains
) -> ControlInput:
    """Inputs imposing ``mu' = -k mu`` on each residual.

    With ``rho' = p_hat^T v`` and body velocity components ``v_i``:

        f    = m (g - k_z mu_z) / s3
        tau2 = J2 [-k_O2 mu_O2 - (J3-J1)/J2 Omega_3 Omega_1
                   + (Omega_2 v1 - Omega_1 v2 + f/m - g s3) / rho
                   - v3 rho' / rho^2]
        tau3 = J3 [-k_O3 mu_O3 - (J1-J2)/J3 Omega_1 Omega_2
                   - (Omega_1 v3 - Omega_3 v1 - g s2) / rho
                   + v2 rho' / rho^2]

    On compatible states the ``-k mu`` terms vanish and this reduces to
    :func:`control_invariance`.
    """
    s2, s3, rho, rho_dot, (v1, v2, v3), (o1, o2, o3) = _body_terms(s, spec)
    mu_z = float(s.v[2])
    mu_O3 = o3 + v2 / rho
    mu_O2 = o2 - v3 / rho
    J1, J2, J3 = params.J1, params.J2, params.J3
    g, m = params.g, params.m

    f = m * (g - gains.k_z * mu_z) / s3
    tau2 = J2 * (
        -gains.k_O2 * mu_O2
        - (J3 - J1) / J2 * o3 * o1
        + (o2 * v1 - o1 * v2 + f / m - g * s3) / rho
        - v3 * rho_dot / rho**2
    )
    tau3 = J3 * (
        -gains.k_O3 * mu_O3
        - (J1 - J2) / J3 * o1 * o2
        - (o1 * v3 - o3 * v1 - g * s2) / rho
        + v2 * rho_dot / rho**2
    )
    return ControlInput(f=f, tau1=0.0, tau2=tau2, tau3=tau3)


@dataclass(frozen=True)
class TransversalityMatrix:
    """Rows: constraints ``(mu_z, mu_O3, mu_O2)``; columns: inputs ``(f, tau2, tau3)``."""

    matrix: np.ndarray
    det: float


def transversality_matrix(
    s: RigidBodyState, params: VehicleParams, spec: TaskSpec
) -> TransversalityMatrix:
    relative_position(s, spec)
    cs = task_constraint_set(spec)
    M = cs.input_matrix(s, params)
    return TransversalityMatrix(M, float(np.linalg.det(M)))


# -- generic solver ---------------------------------------------------------

Coefficients = Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]
CoefficientRates = Callable[
    [np.ndarray, np.ndarray, np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]
]


@dataclass(frozen=True)
class LinearConstraint:
    """One constraint ``mu = A(R, p) . Omega + B(R, p) . v``.

    ``rates``, if given, returns the time derivatives ``(A', B')`` along
    ``(R', p') = (R hat(Omega), v)`` as a function of ``(R, p, Omega, v)``.
    """

    coeffs: Coefficients
    rates: Optional[CoefficientRates] = None
    name: str = ""


@dataclass(frozen=True)
class GenericConstraintSet:
    constraints: tuple[LinearConstraint, ...]
    inputs: tuple[str, ...] = ("f", "tau2", "tau3")

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "inputs", tuple(self.inputs))
        n = len(self.constraints)
        if not 1 <= n <= 4:
            raise DimensionMismatch(f"need 1 to 4 constraints, got {n}")
        if len(self.inputs) != n:
            raise DimensionMismatch(f"{n} constraints but {len(self.inputs)} selected inputs")
        if len(set(self.inputs)) != n or not set(self.inputs) <= set(INPUT_NAMES):
            raise DimensionMismatch(f"invalid input selection {self.inputs}")

    def __len__(self) -> int:
        return len(self.constraints)

    def coefficient_rows(self, R, p) -> np.ndarray:
        """``C(R, p)`` stacked as an ``(m, 6)`` array in ``xi = (Omega, v)`` order."""
        rows = []
        for c in self.constraints:
            A, B = c.coeffs(R, p)
            rows.append(np.concatenate([A, B]))
        return np.array(rows)

    def values(self, s: RigidBodyState) -> np.ndarray:
        return self.coefficient_rows(s.R, s.p) @ np.concatenate([s.omega, s.v])

    def input_matrix(self, s: RigidBodyState, params: VehicleParams) -> np.ndarray:
        """Entries ``C^a . a_j`` for the selected input directions ``a_j``."""
        af = affine_fields(s, params)
        dirs = {"f": af.a_f, "tau1": af.a_tau[0], "tau2": af.a_tau[1], "tau3": af.a_tau[2]}
        A = np.column_stack([dirs[name] for name in self.inputs])
        return self.coefficient_rows(s.R, s.p) @ A

    def coefficient_rates(self, s: RigidBodyState, fd_step: float = DEFAULT_FD_STEP) -> np.ndarray:
        """``dC/dt`` along the configuration velocity, shape ``(m, 6)``.

        Constraints without analytic ``rates`` are differentiated by central
        differences along ``t -> (R exp(t hat(Omega)), p + t v)``, with the
        rotation update taken to first order and projected back to SO(3).
        """
        out = np.empty((len(self), 6))
        plus = minus = None
        for a, c in enumerate(self.constraints):
            if c.rates is not None:
                dA, dB = c.rates(s.R, s.p, s.omega, s.v)
                out[a] = np.concatenate([dA, dB])
                continue
            if plus is None:
                W = hat(s.omega) * fd_step
                plus = (s.R @ project_to_so3(np.eye(3) + W), s.p + fd_step * s.v)
                minus = (s.R @ project_to_so3(np.eye(3) - W), s.p - fd_step * s.v)
            Ap, Bp = c.coeffs(*plus)
            Am, Bm = c.coeffs(*minus)
            out[a] = np.concatenate([Ap - Am, Bp - Bm]) / (2.0 * fd_step)
        return out


def solve_invariance_generic(
    s: RigidBodyState,
    params: VehicleParams,
    cs: GenericConstraintSet,
    gains: Optional[Sequence[float]] = None,
    *,
    fd_step: float = DEFAULT_FD_STEP,
    max_cond: float = DEFAULT_MAX_COND,
) -> ControlInput:
    """Solve ``G^a + sum_j u_j C^a . a_j = -k^a mu^a`` for the selected inputs.

    ``G^a = (C^a)' . xi + C^a . a0`` collects the terms without controls.
    Zero gains give the invariance-enforcing input.  Inputs that are not
    selected are returned as zero.
    """
    m = len(cs)
    k = np.zeros(m) if gains is None else np.asarray(gains, dtype=float).reshape(-1)
    if k.shape != (m,):
        raise DimensionMismatch(f"expected {m} gains, got {k.size}")

    xi = np.concatenate([s.omega, s.v])
    C = cs.coefficient_rows(s.R, s.p)
    M = cs.input_matrix(s, params)
    cond = np.linalg.cond(M)
    if not cond < max_cond:
        raise SingularSystem(f"transversality lost: condition number {cond:.3g} >= {max_cond:.3g}")

    G = cs.coefficient_rates(s, fd_step) @ xi + C @ affine_fields(s, params).a0
    mu = C @ xi
    u_sel = np.linalg.solve(M, -G - k * mu)
    u = dict.fromkeys(INPUT_NAMES, 0.0)
    u.update(zip(cs.inputs, map(float, u_sel)))
    return ControlInput(**u)


def task_constraint_set(spec: TaskSpec, analytic: bool = False) -> GenericConstraintSet:
    """The three pointing-altitude constraints in ``(mu_z, mu_O3, mu_O2)`` order.

    ``analytic=True`` attaches closed-form coefficient rates; otherwise the
    solver differentiates numerically.
    """
    target = spec.target
    zero = np.zeros(3)

    def altitude(R, p):
        return zero, E3

    def altitude_rates(R, p, om, v):
        return zero, zero

    def yaw(R, p):
        return E3, R[:, 1] / _distance(p, target)

    def yaw_rates(R, p, om, v):
        return zero, _scaled_axis_rate(R, p, om, v, target, 1, 1.0)

    def pitch(R, p):
        return E2, -R[:, 2] / _distance(p, target)

    def pitch_rates(R, p, om, v):
        return zero, _scaled_axis_rate(R, p, om, v, target, 2, -1.0)

    return GenericConstraintSet(
        (
            LinearConstraint(altitude, altitude_rates if analytic else None, "mu_z"),
            LinearConstraint(yaw, yaw_rates if analytic else None, "mu_O3"),
            LinearConstraint(pitch, pitch_rates if analytic else None, "mu_O2"),
        ),
        inputs=("f", "tau2", "tau3"),
    )


def _distance(p, target) -> float:
    q = p - target
    return math.sqrt(float(q @ q))


def _scaled_axis_rate(R, p, om, v, target, col, sign) -> np.ndarray:
    # d/dt (sign * b / rho) with b' = (R om) x b and rho' = p_hat . v
    q = p - target
    rho = math.sqrt(float(q @ q))
    b = R[:, col]
    db = cross(R @ om, b)
    return sign * (db / rho - b * float(q @ v) / rho**3)


# -- policies ----------------------------------------------------------------


def invariance_policy(params: VehicleParams, spec: TaskSpec):
    def policy(s: RigidBodyState) -> ControlInput:
        return control_invariance(s, params, spec)

    return policy


def stabilized_policy(params: VehicleParams, spec: TaskSpec, gains: Gains):
    def policy(s: RigidBodyState) -> ControlInput:
        return control_stabilized(s, params, spec, gains)

    return policy


def hold_policy(u: ControlInput):
    def policy(s: RigidBodyState) -> ControlInput:
        return u

    return policy
