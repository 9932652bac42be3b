"""Primitives on SO(3) and the unit quaternion sphere S^3.

Rotations are plain ``(3, 3)`` float64 arrays and quaternions are ``(4,)``
arrays ordered ``(w, x, y, z)``. Conversions and the exp/log maps go through
:class:`scipy.spatial.transform.Rotation`, which uses the largest-pivot
quaternion extraction and therefore has no singularity at angle pi.
"""

from __future__ import annotations

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial.transform import Rotation as ScipyRotation

from .exceptions import DegenerateProjectionError, InvalidRotationError, NonUnitQuaternionError

Matrix = NDArray[np.float64]
Vector = NDArray[np.float64]

# Manifold membership tolerance applied on construction
ROTATION_TOLERANCE = 1e-9
QUATERNION_TOLERANCE = 1e-9

# Relative singular value gap below which a projection is ambiguous
_DEGENERACY_TOLERANCE = 1e-12

CHORDAL_DIAMETER = 2.0 * np.sqrt(2.0)


def hat(omega: ArrayLike) -> Matrix:
    """Map a rotation vector to its skew-symmetric matrix."""
    x, y, z = np.asarray(omega, dtype=np.float64)
    return np.array(
        [
            [0.0, -z, y],
            [z, 0.0, -x],
            [-y, x, 0.0],
        ]
    )


def vee(skew: ArrayLike) -> Vector:
    """Inverse of :func:`hat`; reads the antisymmetric part only."""
    s = np.asarray(skew, dtype=np.float64)
    return 0.5 * np.array([s[2, 1] - s[1, 2], s[0, 2] - s[2, 0], s[1, 0] - s[0, 1]])


def orthogonality_error(matrix: ArrayLike) -> float:
    """Return ||M^T M - I||_F."""
    m = np.asarray(matrix, dtype=np.float64)
    return float(np.linalg.norm(m.T @ m - np.eye(3)))


def validate_rotation(matrix: ArrayLike, tol: float = ROTATION_TOLERANCE) -> Matrix:
    """Check that a matrix is a proper rotation.

    Args:
        matrix: Candidate 3x3 matrix
        tol: Bound on both ||R^T R - I||_F and |det R - 1|

    Returns:
        A float64 copy of the matrix

    Raises:
        InvalidRotationError: If the shape, finiteness, orthogonality or
            determinant check fails
    """
    m = np.array(matrix, dtype=np.float64)
    if m.shape != (3, 3):
        raise InvalidRotationError(f"Expected a 3x3 matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidRotationError("Matrix has non-finite entries")

    ortho = orthogonality_error(m)
    if ortho > tol:
        raise InvalidRotationError(f"Matrix is not orthogonal (||R^T R - I||_F = {ortho:.3e})")
    det = float(np.linalg.det(m))
    if abs(det - 1.0) > tol:
        raise InvalidRotationError(f"Matrix is not a proper rotation (det = {det:.12f})")
    return m


def canonical_quat(q: ArrayLike) -> Vector:
    """Pick the sheet of the double cover with w >= 0.

    When w is exactly zero the first nonzero component is made positive.
    """
    q = np.array(q, dtype=np.float64)
    for component in q:
        if component != 0.0:
            return -q if component < 0.0 else q
    return q


def validate_quat(q: ArrayLike, tol: float = QUATERNION_TOLERANCE) -> Vector:
    """Check that a 4-vector is a unit quaternion and return a float64 copy."""
    q = np.array(q, dtype=np.float64)
    if q.shape != (4,):
        raise NonUnitQuaternionError(f"Expected a 4-vector, got shape {q.shape}")
    norm = float(np.linalg.norm(q))
    if not np.isfinite(norm) or abs(norm - 1.0) > tol:
        raise NonUnitQuaternionError(f"Quaternion norm is {norm:.12f}, expected 1")
    return q


def quat_to_rotation(q: ArrayLike) -> Matrix:
    """Map a unit quaternion (w, x, y, z) to its rotation matrix.

    Raises:
        NonUnitQuaternionError: If |‖q‖ - 1| exceeds the quaternion tolerance
    """
    w, x, y, z = validate_quat(q)
    matrix: Matrix = ScipyRotation.from_quat([x, y, z, w]).as_matrix()
    return matrix


def rotation_to_quat(rotation: ArrayLike) -> Vector:
    """Map a rotation matrix to its canonical unit quaternion (w, x, y, z)."""
    x, y, z, w = ScipyRotation.from_matrix(np.asarray(rotation, dtype=np.float64)).as_quat()
    return canonical_quat([w, x, y, z])


def exp_so3(omega: ArrayLike) -> Matrix:
    """Rodrigues map from a rotation vector to a rotation matrix."""
    matrix: Matrix = ScipyRotation.from_rotvec(np.asarray(omega, dtype=np.float64)).as_matrix()
    return matrix


def log_so3(rotation: ArrayLike) -> Vector:
    """Rotation vector of a rotation matrix, with angle in [0, pi].

    At angle pi the axis is read from the canonical quaternion, so a half
    turn about +x maps to (pi, 0, 0) rather than (-pi, 0, 0).
    """
    q = rotation_to_quat(rotation)
    sin_half = float(np.linalg.norm(q[1:]))
    if sin_half == 0.0:
        return np.zeros(3)
    angle = 2.0 * np.arctan2(sin_half, q[0])
    return angle * q[1:] / sin_half


def log_so3_many(rotations: ArrayLike) -> NDArray[np.float64]:
    """Vectorized :func:`log_so3` over a ``(N, 3, 3)`` stack."""
    omegas: NDArray[np.float64] = ScipyRotation.from_matrix(
        np.asarray(rotations, dtype=np.float64)
    ).as_rotvec()
    return omegas


def rotation_angle(rotation: ArrayLike) -> float:
    """Rotation angle in [0, pi]."""
    return float(ScipyRotation.from_matrix(np.asarray(rotation, dtype=np.float64)).magnitude())


def dist_chordal(r1: ArrayLike, r2: ArrayLike) -> float:
    """Frobenius distance ||R1 - R2||_F, in [0, 2*sqrt(2)]."""
    difference = np.asarray(r1, dtype=np.float64) - np.asarray(r2, dtype=np.float64)
    return float(np.linalg.norm(difference))


def dist_geodesic(r1: ArrayLike, r2: ArrayLike) -> float:
    """Geodesic (angular) distance, the angle of R1^T R2, in [0, pi]."""
    relative = np.asarray(r1, dtype=np.float64).T @ np.asarray(r2, dtype=np.float64)
    return rotation_angle(relative)


def project_to_so3(matrix: ArrayLike) -> Matrix:
    """Nearest rotation to a matrix in the Frobenius norm.

    Uses the SVD M = U S V^T and flips the smallest singular direction when
    det(U V^T) < 0.

    Args:
        matrix: Any real 3x3 matrix

    Returns:
        argmin over SO(3) of ||M - R||_F

    Raises:
        InvalidRotationError: If the matrix has the wrong shape or non-finite entries
        DegenerateProjectionError: If the minimizer is not unique
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.shape != (3, 3) or not np.all(np.isfinite(m)):
        raise InvalidRotationError("Projection needs a finite 3x3 matrix")

    u, s, vt = np.linalg.svd(m)
    scale = s[0]
    if scale == 0.0 or s[2] <= _DEGENERACY_TOLERANCE * scale:
        raise DegenerateProjectionError(f"Matrix is rank deficient (singular values {s})")

    sign = np.sign(np.linalg.det(u @ vt))
    if sign < 0 and s[1] - s[2] <= _DEGENERACY_TOLERANCE * scale:
        raise DegenerateProjectionError(
            f"Projection is ambiguous: tied singular values {s[1]:.6g}, {s[2]:.6g} "
            "with negative determinant"
        )
    u[:, 2] *= sign
    projected: Matrix = u @ vt
    return projected


def project_stack(matrices: NDArray[np.float64]) -> NDArray[np.float64]:
    """Project a ``(N, 3, 3)`` stack of near-rotations onto SO(3).

    No degeneracy checks; intended for re-certifying integrator output.
    """
    u, _, vt = np.linalg.svd(matrices)
    signs = np.sign(np.linalg.det(u @ vt))
    u[:, :, 2] *= signs[:, None]
    projected: NDArray[np.float64] = u @ vt
    return projected


def sphere_points(rotation: ArrayLike) -> tuple[Vector, Vector, Vector]:
    """Images of the basis vectors V1, V2, V3 (the columns of R) on S^2."""
    r = np.asarray(rotation, dtype=np.float64)
    return r[:, 0].copy(), r[:, 1].copy(), r[:, 2].copy()


def random_rotation(rng: np.random.Generator) -> Matrix:
    """Draw a rotation uniformly (Haar measure) from SO(3)."""
    q = rng.standard_normal(4)
    return quat_to_rotation(q / np.linalg.norm(q))
