"""Geometry of the pointing-altitude task.

The task manifold is the set of poses with the first body axis aimed at the
target, ``b1 = -p_hat`` with ``p_hat = (p - target) / rho``, flying at the
altitude ``e3^T p = z0``.  Velocities tangent to it satisfy three linear
conditions, whose violations are the residuals

    mu_z  = e3^T v
    mu_O3 = Omega_3 + b2^T v / rho
    mu_O2 = Omega_2 - b3^T v / rho

The rotational pair comes from differentiating ``b1 + p_hat = 0``:
``b1' = (R Omega) x b1 = Omega_3 b2 - Omega_2 b3`` and
``p_hat' = (I - p_hat p_hat^T) v / rho``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import RigidBodyState, VehicleParams
from .errors import InfeasibleGeometry, TargetCollision
from .se3 import E3, cross, norm, vec3


@dataclass(frozen=True, eq=False)
class TaskSpec:
    target: np.ndarray = None
    z0: float = 0.58
    eps_s: float = 0.1
    eps_rho: float = 0.1

    def __post_init__(self):
        target = np.zeros(3) if self.target is None else vec3(self.target)
        object.__setattr__(self, "target", target)
        if not 0.0 < self.eps_s < 1.0:
            raise ValueError(f"eps_s must lie in (0, 1), got {self.eps_s}")
        if not self.eps_rho > 0.0:
            raise ValueError(f"eps_rho must be positive, got {self.eps_rho}")
        if not math.isfinite(self.z0):
            raise ValueError("z0 must be finite")

    def __eq__(self, other):
        if not isinstance(other, TaskSpec):
            return NotImplemented
        return (
            bool(np.array_equal(self.target, other.target))
            and (self.z0, self.eps_s, self.eps_rho) == (other.z0, other.eps_s, other.eps_rho)
        )


@dataclass(frozen=True)
class ResidualVector:
    mu_z: float
    mu_O3: float
    mu_O2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.mu_z, self.mu_O3, self.mu_O2])


@dataclass(frozen=True)
class TaskErrors:
    e_pt: float
    e_z: float


@dataclass(frozen=True)
class RegularityReport:
    s3: float
    s2: float
    rho: float
    feasible: bool


def relative_position(
    s: RigidBodyState, spec: TaskSpec, check: bool = True
) -> tuple[np.ndarray, float]:
    """``(p - target, rho)``, raising :class:`TargetCollision` below ``eps_rho``.

    With ``check=False`` only an exact hit on the target is rejected.
    """
    q = s.p - spec.target
    qx, qy, qz = q.tolist()
    rho = math.sqrt(qx * qx + qy * qy + qz * qz)
    if not rho >= (spec.eps_rho if check else 1e-300):
        raise TargetCollision(f"distance to target {rho:.3g} below eps_rho = {spec.eps_rho}")
    return q, rho


def residuals(s: RigidBodyState, spec: TaskSpec, check: bool = True) -> ResidualVector:
    _, rho = relative_position(s, spec, check)
    (_, r12, r13), (_, r22, r23), (_, r32, r33) = s.R.tolist()
    vx, vy, vz = s.v.tolist()
    _, o2, o3 = s.omega.tolist()
    v2 = r12 * vx + r22 * vy + r32 * vz
    v3 = r13 * vx + r23 * vy + r33 * vz
    return ResidualVector(vz, o3 + v2 / rho, o2 - v3 / rho)


def task_errors(s: RigidBodyState, spec: TaskSpec, check: bool = True) -> TaskErrors:
    q, rho = relative_position(s, spec, check)
    return TaskErrors(norm(s.R[:, 0] + q / rho), abs(float(s.p[2]) - spec.z0))


def regularity(s: RigidBodyState, spec: TaskSpec) -> RegularityReport:
    s2, s3 = s.R[2, 1:].tolist()
    qx, qy, qz = (s.p - spec.target).tolist()
    rho = math.sqrt(qx * qx + qy * qy + qz * qz)
    feasible = abs(s3) >= spec.eps_s and rho >= spec.eps_rho
    return RegularityReport(s3=s3, s2=s2, rho=rho, feasible=feasible)


def pointing_frame(p, spec: TaskSpec) -> np.ndarray:
    """Rotation with ``b1 = -p_hat``, ``b2`` horizontal and ``e3^T b3 > 0``.

    ``b2 = e3 x b1 / |e3 x b1|`` is tangent to the horizontal circle around
    the target, and ``b3 = b1 x b2``.
    """
    q = vec3(p) - spec.target
    rho = norm(q)
    if rho < spec.eps_rho:
        raise TargetCollision(f"distance to target {rho:.3g} below eps_rho = {spec.eps_rho}")
    b1 = -q / rho
    t = cross(E3, b1)
    nt = norm(t)
    if nt < spec.eps_s:
        # e3^T b3 equals |e3 x b1| for this construction
        raise InfeasibleGeometry(
            f"line of sight too close to vertical: e3^T b3 = {nt:.3g} < eps_s = {spec.eps_s}"
        )
    b2 = t / nt
    b3 = cross(b1, b2)
    if b3[2] < 0.0:
        b2, b3 = -b2, -b3
    return np.column_stack([b1, b2, b3])


def orbit_speed(spec: TaskSpec, params: VehicleParams) -> float:
    """Tangential speed of the steady circular orbit around the target.

    On the task manifold the thrust axis leans toward the vertical through
    the target, giving a horizontal acceleration ``g dz / r`` with ``dz``
    the height above the target.  Balancing it against ``speed**2 / r``
    gives ``sqrt(g dz)`` for every radius.
    """
    dz = spec.z0 - spec.target[2]
    if dz < 0.0:
        raise InfeasibleGeometry("no steady orbit exists below the target altitude")
    return math.sqrt(params.g * dz)


def on_manifold_init(
    theta: float, r: float, spec: TaskSpec, tangential_speed: float = 0.0
) -> RigidBodyState:
    """State on the task manifold with all three residuals zero.

    The position is at horizontal radius ``r`` and azimuth ``theta`` around
    the target at altitude ``z0``.  The attitude comes from
    :func:`pointing_frame` and ``v = tangential_speed * b2``.  ``Omega_2``
    and ``Omega_3`` follow from the residuals.  The free roll rate
    ``Omega_1`` is chosen so that the body rotates about the world
    vertical at the angular rate of the horizontal motion.  With
    ``tangential_speed = orbit_speed(...)`` this gives a relative
    equilibrium of the invariance-enforcing closed loop.
    """
    if not r > 0.0:
        raise ValueError(f"radius must be positive, got {r}")
    p = spec.target + np.array([r * math.cos(theta), r * math.sin(theta), 0.0])
    p[2] = spec.z0
    R = pointing_frame(p, spec)
    rho = norm(p - spec.target)
    v = tangential_speed * R[:, 1]
    v[2] = 0.0  # b2 is horizontal; keep e3^T v exactly zero
    heading_rate = -tangential_speed / r  # b2 points clockwise seen from above
    omega = heading_rate * R[2, :]  # R^T (w e3)
    vb = R.T @ v
    omega[1] = vb[2] / rho
    omega[2] = -vb[1] / rho
    return RigidBodyState(R, p, v, omega)


def perturb_vertical(s: RigidBodyState, delta: float) -> RigidBodyState:
    """Add ``delta * e3`` to the world velocity (shifts ``mu_z`` by ``delta``).

    The rotational residuals also move, through ``b2^T e3`` and ``b3^T e3``.
    """
    if delta == 0.0:
        return s
    return s.replace(v=s.v + delta * E3)
