"""Quadrotor rigid-body equations of motion on SE(3).

    p' = v
    m v' = f R e3 - m g e3
    R' = R hat(Omega)
    J Omega' + Omega x J Omega = tau,   J = diag(J1, J2, J3)

``v`` is expressed in the world frame and ``Omega`` in the body frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .se3 import E3, as_rotation, cross, hat, vec3


@dataclass(frozen=True)
class VehicleParams:
    m: float = 1.0
    g: float = 9.8
    J1: float = 2.0
    J2: float = 2.0
    J3: float = 6.0

    def __post_init__(self):
        for name in ("m", "g", "J1", "J2", "J3"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ValueError(f"vehicle parameter {name} must be positive, got {val}")

    @classmethod
    def from_inertia(cls, m: float, g: float, J) -> "VehicleParams":
        """Build from a 3x3 inertia matrix; only diagonal matrices are accepted."""
        J = np.asarray(J, dtype=float)
        if J.shape != (3, 3):
            raise ValueError("inertia must be 3x3")
        if np.any(J - np.diag(np.diag(J))):
            raise ValueError("inertia must be diagonal in the body frame")
        return cls(m, g, *map(float, np.diag(J)))

    @property
    def J(self) -> np.ndarray:
        return np.array([self.J1, self.J2, self.J3])

    @property
    def weight(self) -> float:
        return self.m * self.g


@dataclass(frozen=True, eq=False)
class RigidBodyState:
    """Pose ``(R, p)`` with world-frame velocity ``v`` and body rate ``omega``.

    The constructor checks that ``R`` is a rotation to 1e-9.  Integrator
    stage states, which live in the ambient 3x3 space, are built with
    :meth:`unchecked`.
    """

    R: np.ndarray
    p: np.ndarray
    v: np.ndarray
    omega: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "R", as_rotation(self.R))
        for name in ("p", "v", "omega"):
            object.__setattr__(self, name, vec3(getattr(self, name)))

    @classmethod
    def unchecked(cls, R, p, v, omega) -> "RigidBodyState":
        s = object.__new__(cls)
        object.__setattr__(s, "R", R)
        object.__setattr__(s, "p", p)
        object.__setattr__(s, "v", v)
        object.__setattr__(s, "omega", omega)
        return s

    @classmethod
    def at_rest(cls, R=None, p=(0.0, 0.0, 0.0)) -> "RigidBodyState":
        return cls(np.eye(3) if R is None else R, p, np.zeros(3), np.zeros(3))

    def replace(self, **changes) -> "RigidBodyState":
        fields = {"R": self.R, "p": self.p, "v": self.v, "omega": self.omega}
        fields.update(changes)
        return RigidBodyState(**fields)

    def body_velocity(self) -> np.ndarray:
        """Components ``v_i = b_i^T v`` of the translational velocity."""
        return self.R.T @ self.v

    def as_vector(self) -> np.ndarray:
        return np.concatenate([self.R.reshape(9), self.p, self.v, self.omega])

    @classmethod
    def from_vector(cls, x) -> "RigidBodyState":
        x = np.asarray(x, dtype=float)
        return cls(x[:9].reshape(3, 3), x[9:12], x[12:15], x[15:18])

    def __eq__(self, other):
        if not isinstance(other, RigidBodyState):
            return NotImplemented
        return bool(np.array_equal(self.as_vector(), other.as_vector()))


@dataclass(frozen=True)
class ControlInput:
    f: float = 0.0
    tau1: float = 0.0
    tau2: float = 0.0
    tau3: float = 0.0

    @property
    def tau(self) -> np.ndarray:
        return np.array([self.tau1, self.tau2, self.tau3])

    @classmethod
    def from_array(cls, u) -> "ControlInput":
        f, t1, t2, t3 = map(float, u)
        return cls(f, t1, t2, t3)

    def as_array(self) -> np.ndarray:
        return np.array([self.f, self.tau1, self.tau2, self.tau3])


@dataclass(frozen=True)
class StateDerivative:
    dR: np.ndarray
    dp: np.ndarray
    dv: np.ndarray
    domega: np.ndarray


@dataclass(frozen=True)
class AffineFields:
    """Velocity-level split ``xi' = a0 + f a_f + sum_i tau_i a_tau[i]``.

    Every field is a 6-vector ordered like ``xi = (Omega, v)``.
    """

    a0: np.ndarray
    a_f: np.ndarray
    a_tau: np.ndarray = field(repr=False)  # shape (3, 6), row i is a_tau_{i+1}

    def xi_dot(self, u: ControlInput) -> np.ndarray:
        return self.a0 + u.f * self.a_f + u.tau @ self.a_tau


def euler_rhs(omega, tau, J) -> np.ndarray:
    return (tau - cross(omega, J * omega)) / J


def state_derivative(s: RigidBodyState, params: VehicleParams, u: ControlInput) -> StateDerivative:
    R = s.R
    J = params.J
    dv = (u.f / params.m) * R[:, 2] - params.g * E3
    return StateDerivative(
        dR=R @ hat(s.omega),
        dp=s.v.copy(),
        dv=dv,
        domega=euler_rhs(s.omega, u.tau, J),
    )


def affine_fields(s: RigidBodyState, params: VehicleParams) -> AffineFields:
    J = params.J
    a0 = np.concatenate([-cross(s.omega, J * s.omega) / J, -params.g * E3])
    a_f = np.concatenate([np.zeros(3), s.R[:, 2] / params.m])
    a_tau = np.zeros((3, 6))
    a_tau[[0, 1, 2], [0, 1, 2]] = 1.0 / J
    return AffineFields(a0, a_f, a_tau)
