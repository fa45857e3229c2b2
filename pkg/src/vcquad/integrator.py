"""Fixed-step RK4 for the closed loop, with SO(3) repair and trajectory recording."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .dynamics import ControlInput, RigidBodyState, VehicleParams
from .errors import ControlError, InfeasibleEncountered, PolicyFailure
from .se3 import reorthonormalize
from .task import (
    RegularityReport,
    ResidualVector,
    TaskErrors,
    TaskSpec,
    regularity,
    residuals,
    task_errors,
)

log = logging.getLogger(__name__)

Policy = Callable[[RigidBodyState], ControlInput]


@dataclass(frozen=True)
class SimConfig:
    h: float = 1e-3
    T: float = 10.0
    reorthonormalize_every: int = 1
    abort_on_infeasible: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.h) and self.h > 0):
            raise ValueError(f"step h must be positive, got {self.h}")
        if not (math.isfinite(self.T) and self.T > 0):
            raise ValueError(f"horizon T must be positive, got {self.T}")
        if self.h > self.T:
            raise ValueError("step h exceeds horizon T")
        if int(self.reorthonormalize_every) != self.reorthonormalize_every or self.reorthonormalize_every < 1:
            raise ValueError("reorthonormalize_every must be a positive integer")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.h))


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    state: RigidBodyState
    input: ControlInput
    residuals: ResidualVector
    errors: TaskErrors
    regularity: RegularityReport


def _rhs(x: np.ndarray, u: ControlInput, params: VehicleParams) -> np.ndarray:
    # x = (R row-major, p, v, Omega); scalar arithmetic is faster than numpy on 3-vectors
    r11, r12, r13, r21, r22, r23, r31, r32, r33, _, _, _, vx, vy, vz, o1, o2, o3 = x.tolist()
    J1, J2, J3 = params.J1, params.J2, params.J3
    a = u.f / params.m
    return np.array(
        [
            r12 * o3 - r13 * o2, r13 * o1 - r11 * o3, r11 * o2 - r12 * o1,
            r22 * o3 - r23 * o2, r23 * o1 - r21 * o3, r21 * o2 - r22 * o1,
            r32 * o3 - r33 * o2, r33 * o1 - r31 * o3, r31 * o2 - r32 * o1,
            vx, vy, vz,
            a * r13, a * r23, a * r33 - params.g,
            (u.tau1 - (J3 - J2) * o2 * o3) / J1,
            (u.tau2 - (J1 - J3) * o3 * o1) / J2,
            (u.tau3 - (J2 - J1) * o1 * o2) / J3,
        ]
    )  # fmt: skip


def _evaluate(policy: Policy, x: np.ndarray, stage: int) -> ControlInput:
    s = RigidBodyState.unchecked(x[:9].reshape(3, 3), x[9:12], x[12:15], x[15:18])
    try:
        return policy(s)
    except ControlError as exc:
        raise PolicyFailure(f"policy failed at RK4 stage {stage}: {exc}", stage) from exc


def rk4_step(
    s: RigidBodyState,
    h: float,
    policy: Policy,
    params: VehicleParams,
    *,
    project: bool = True,
    u0: Optional[ControlInput] = None,
) -> RigidBodyState:
    """One classical RK4 step of the closed loop in the ambient space.

    The policy is evaluated at each of the four stage states.  ``u0`` may
    carry an already computed ``policy(s)``.  When ``project`` is set the
    updated attitude is replaced by its nearest rotation.
    """
    x = np.concatenate([s.R.reshape(9), s.p, s.v, s.omega])
    u1 = u0 if u0 is not None else _evaluate(policy, x, 1)
    k1 = _rhs(x, u1, params)
    x2 = x + (0.5 * h) * k1
    k2 = _rhs(x2, _evaluate(policy, x2, 2), params)
    x3 = x + (0.5 * h) * k2
    k3 = _rhs(x3, _evaluate(policy, x3, 3), params)
    x4 = x + h * k3
    k4 = _rhs(x4, _evaluate(policy, x4, 4), params)
    y = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    R = y[:9].reshape(3, 3)
    if project:
        R = reorthonormalize(R)
    return RigidBodyState.unchecked(R, y[9:12], y[12:15], y[15:18])


def make_sample(
    t: float,
    s: RigidBodyState,
    u: ControlInput,
    spec: TaskSpec,
    reg: Optional[RegularityReport] = None,
) -> TrajectorySample:
    return TrajectorySample(
        t=t,
        state=s,
        input=u,
        # reporting only: states inside the distance threshold are still logged
        residuals=residuals(s, spec, check=False),
        errors=task_errors(s, spec, check=False),
        regularity=reg if reg is not None else regularity(s, spec),
    )


def simulate(
    init: RigidBodyState,
    policy: Policy,
    params: VehicleParams,
    spec: TaskSpec,
    cfg: SimConfig,
) -> list[TrajectorySample]:
    """Integrate from ``init`` and record a sample at ``t = k h``, ``k = 0..N``.

    With ``cfg.abort_on_infeasible`` the run stops with
    :class:`InfeasibleEncountered` at the first sample failing the
    regularity test.  A policy that becomes undefined always stops the run.
    """
    if not regularity(init, spec).feasible:
        raise InfeasibleEncountered("initial state is not regular", -1, [])

    samples: list[TrajectorySample] = []
    s = init
    n = cfg.n_steps
    every = int(cfg.reorthonormalize_every)
    for k in range(n + 1):
        t = k * cfg.h
        reg = regularity(s, spec)
        if cfg.abort_on_infeasible and not reg.feasible:
            raise InfeasibleEncountered(
                f"regularity lost at t = {t:.6g}: |s3| = {abs(reg.s3):.3g}, rho = {reg.rho:.3g}",
                len(samples) - 1,
                samples,
            )
        try:
            u = policy(s)
            samples.append(make_sample(t, s, u, spec, reg))
            if k == n:
                break
            s = rk4_step(s, cfg.h, policy, params, project=(k + 1) % every == 0, u0=u)
        except (ControlError, PolicyFailure) as exc:
            raise InfeasibleEncountered(
                f"control undefined near t = {t:.6g}: {exc}", len(samples) - 1, samples
            ) from exc
    log.debug("simulated %d steps of h = %g", n, cfg.h)
    return samples


def state_arrays(samples: list[TrajectorySample]) -> dict[str, np.ndarray]:
    """Column arrays of the most used quantities, keyed like the CSV header."""
    return {
        "t": np.array([x.t for x in samples]),
        "mu_z": np.array([x.residuals.mu_z for x in samples]),
        "mu_O3": np.array([x.residuals.mu_O3 for x in samples]),
        "mu_O2": np.array([x.residuals.mu_O2 for x in samples]),
        "e_pt": np.array([x.errors.e_pt for x in samples]),
        "e_z": np.array([x.errors.e_z for x in samples]),
        "s3": np.array([x.regularity.s3 for x in samples]),
        "rho": np.array([x.regularity.rho for x in samples]),
        "f": np.array([x.input.f for x in samples]),
        "tau_2": np.array([x.input.tau2 for x in samples]),
        "tau_3": np.array([x.input.tau3 for x in samples]),
    }
