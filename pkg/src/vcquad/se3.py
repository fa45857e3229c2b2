"""SO(3)/SE(3) helpers: hat/vee, body axes, rotation validation and projection.

Vectors are length-3 ``float`` numpy arrays and matrices are 3x3 arrays.
Rotations are plain arrays that passed :func:`as_rotation`.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import Degenerate, InvalidRotation, NotSkew

ORTHO_TOL = 1e-9
SKEW_TOL = 1e-9

E1 = np.array([1.0, 0.0, 0.0])
E2 = np.array([0.0, 1.0, 0.0])
E3 = np.array([0.0, 0.0, 1.0])
_AXES = (E1, E2, E3)


def vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite vector: {v}")
    return v


def hat(v) -> np.ndarray:
    """Skew matrix with ``hat(v) @ w == cross(v, w)``."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def vee(M, tol: float = SKEW_TOL) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if np.max(np.abs(M + M.T)) > tol:
        raise NotSkew(f"matrix is not skew-symmetric (residual {np.max(np.abs(M + M.T)):.3g})")
    return np.array([M[2, 1], M[0, 2], M[1, 0]])


def cross(a, b) -> np.ndarray:
    # np.cross is an order of magnitude slower on length-3 inputs
    return np.array(
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    )


def norm(v) -> float:
    return math.sqrt(float(v @ v))


def body_axis(R, i: int) -> np.ndarray:
    """Body axis ``b_i = R e_i`` for ``i`` in 1..3."""
    if i not in (1, 2, 3):
        raise ValueError(f"axis index must be 1, 2 or 3, got {i}")
    return np.array(R[:, i - 1])


def orthogonality_error(R) -> float:
    R = np.asarray(R, dtype=float)
    return float(np.linalg.norm(R.T @ R - np.eye(3)))


def is_rotation(R, tol: float = ORTHO_TOL) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        return False
    return orthogonality_error(R) <= tol and abs(np.linalg.det(R) - 1.0) <= tol


def as_rotation(M, tol: float = ORTHO_TOL) -> np.ndarray:
    """Return ``M`` as a float array after checking it lies on SO(3)."""
    R = np.array(M, dtype=float)
    if not is_rotation(R, tol):
        raise InvalidRotation(
            f"not a rotation: |R^T R - I|_F = {orthogonality_error(R):.3g}, "
            f"det = {np.linalg.det(R):.12g}"
        )
    return R


def project_to_so3(M) -> np.ndarray:
    """Frobenius-nearest rotation (orthogonal polar factor) of ``M``.

    Raises :class:`Degenerate` when ``M`` is singular or has ``det <= 0``,
    where the polar factor would not be a proper rotation.
    """
    M = np.asarray(M, dtype=float)
    U, S, Vt = np.linalg.svd(M)
    if not np.all(np.isfinite(S)) or S[-1] <= 1e-12 * max(S[0], 1e-300):
        raise Degenerate("matrix is singular")
    if np.linalg.det(M) <= 0.0:
        raise Degenerate("matrix has non-positive determinant")
    return U @ Vt


def reorthonormalize(R) -> np.ndarray:
    """Polar projection specialised to nearly orthogonal ``R``.

    Newton-Schulz steps ``R <- R (3I - R^T R) / 2`` converge quadratically
    to the same orthogonal polar factor that :func:`project_to_so3`
    returns.  Matrices far from SO(3) fall back to the SVD.
    """
    E = R.T @ R
    E[0, 0] -= 1.0
    E[1, 1] -= 1.0
    E[2, 2] -= 1.0
    err = float(np.max(np.abs(E)))
    if err > 1e-4:
        return project_to_so3(R)
    while err > 1e-15:
        R = R - 0.5 * (R @ E)
        E = R.T @ R
        E[0, 0] -= 1.0
        E[1, 1] -= 1.0
        E[2, 2] -= 1.0
        err_next = float(np.max(np.abs(E)))
        if err_next >= err:
            break
        err = err_next
    return R


def rot_x(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(a: float) -> np.ndarray:
    c, s = math.cos(a), math.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def expm_so3(w) -> np.ndarray:
    """Rodrigues formula for ``exp(hat(w))``."""
    th = norm(w)
    W = hat(w)
    if th < 1e-8:
        return np.eye(3) + W + 0.5 * W @ W
    return np.eye(3) + (math.sin(th) / th) * W + ((1.0 - math.cos(th)) / th**2) * W @ W
