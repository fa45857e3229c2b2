"""Random state generators shared by the test modules."""

import math

import numpy as np
from hypothesis import strategies as st

from vcquad.dynamics import RigidBodyState, VehicleParams
from vcquad.se3 import expm_so3
from vcquad.task import TaskSpec, pointing_frame

PARAMS = VehicleParams()

finite = st.floats(min_value=-5.0, max_value=5.0, allow_nan=False, allow_infinity=False)
vectors = st.tuples(finite, finite, finite).map(np.array)
seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_rotation(rng) -> np.ndarray:
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    return expm_so3(axis * rng.uniform(0.0, math.pi))


def random_feasible_state(rng, spec=TaskSpec(), min_s3=0.2, scale=1.0) -> RigidBodyState:
    """Generic state (not on the task manifold) with |s3| >= min_s3 and rho in [0.5, 3]."""
    while True:
        R = random_rotation(rng)
        if abs(R[2, 2]) >= min_s3:
            break
    d = rng.normal(size=3)
    p = spec.target + d / np.linalg.norm(d) * rng.uniform(0.5, 3.0)
    return RigidBodyState(R, p, scale * rng.normal(size=3), scale * rng.normal(size=3))


def compatible_state(rng, spec=None) -> RigidBodyState:
    """State with b1 = -p_hat, altitude z0 and all three residuals zero.

    Broader than the orbit initializer: the horizontal velocity has a random
    radial part and the roll rate is free.
    """
    if spec is None:
        spec = TaskSpec(target=rng.uniform(-1, 1, 3), z0=rng.uniform(-1, 1))
    th = rng.uniform(0, 2 * math.pi)
    r = rng.uniform(0.5, 3.0)
    p = spec.target + np.array([r * math.cos(th), r * math.sin(th), 0.0])
    p[2] = spec.z0
    R = pointing_frame(p, spec)
    rho = float(np.linalg.norm(p - spec.target))
    v = np.append(rng.normal(size=2), 0.0)
    vb = R.T @ v
    omega = np.array([rng.normal(), vb[2] / rho, -vb[1] / rho])
    return RigidBodyState(R, p, v, omega), spec
