"""Rotation representations and conversions.

Conventions used throughout the package:

* rotation matrices are numpy arrays of shape ``(..., 3, 3)``, world = R @ local;
* quaternions are ``(..., 4)`` arrays in ``(w, x, y, z)`` order, canonicalized
  to ``w >= 0`` (the two antipodal quaternions encode the same rotation);
* 6D vectors are ``(..., 6)`` arrays holding the first two columns of the
  rotation matrix, recovered via Gram-Schmidt;
* axis-angle (rotation) vectors are ``(..., 3)`` arrays, angle = vector norm.

All functions accept arbitrary leading batch dimensions.
"""

import numpy as np

from .errors import DegenerateInput, NonOrthonormalInput, NonUnitQuaternion

_EPS6D = 1e-8


def identity_matrix(shape=()):
    """Identity rotation broadcast to ``shape + (3, 3)``."""
    out = np.zeros(tuple(shape) + (3, 3))
    out[..., 0, 0] = out[..., 1, 1] = out[..., 2, 2] = 1.0
    return out


def is_orthonormal(R, tol=1e-9):
    R = np.asarray(R)
    eye = identity_matrix(R.shape[:-2])
    ortho = np.abs(np.swapaxes(R, -1, -2) @ R - eye).max() <= tol
    return bool(ortho) and bool((np.linalg.det(R) > 0).all())


def check_orthonormal(R, tol=1e-6, what="rotation matrix"):
    if not is_orthonormal(np.asarray(R, dtype=float), tol):
        raise NonOrthonormalInput(f"{what} is not orthonormal within {tol}")


def rot6d_to_matrix(r):
    """Decode 6D rotation vectors into rotation matrices via Gram-Schmidt.

    The first three components give the (unnormalized) first column, the
    second three are orthogonalized against it, and the third column is the
    cross product.  Raises :class:`DegenerateInput` when either normalization
    would divide by a near-zero norm, which signals a collapsed prediction.
    """
    r = np.asarray(r, dtype=float)
    if r.shape[-1] != 6:
        raise DegenerateInput(f"6D vector expected, got shape {r.shape}")
    a, b = r[..., :3], r[..., 3:]
    na = np.linalg.norm(a, axis=-1, keepdims=True)
    if (na <= _EPS6D).any():
        raise DegenerateInput("first 6D column has near-zero norm")
    c1 = a / na
    b_perp = b - np.sum(c1 * b, axis=-1, keepdims=True) * c1
    nb = np.linalg.norm(b_perp, axis=-1, keepdims=True)
    if (nb <= _EPS6D).any():
        raise DegenerateInput("second 6D column is parallel to the first")
    c2 = b_perp / nb
    c3 = np.cross(c1, c2)
    return np.stack([c1, c2, c3], axis=-1)


def matrix_to_rot6d(R):
    """First two columns of ``R``, concatenated (inverse of rot6d_to_matrix)."""
    R = np.asarray(R, dtype=float)
    return np.concatenate([R[..., :, 0], R[..., :, 1]], axis=-1)


def quat_normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_canonical(q):
    """Flip sign so that w >= 0."""
    q = np.asarray(q, dtype=float)
    sign = np.where(q[..., :1] < 0.0, -1.0, 1.0)
    return q * sign


def quat_to_matrix(q):
    q = np.asarray(q, dtype=float)
    w, x, y, z = q[..., 0], q[..., 1], q[..., 2], q[..., 3]
    R = np.empty(q.shape[:-1] + (3, 3))
    R[..., 0, 0] = 1 - 2 * (y * y + z * z)
    R[..., 0, 1] = 2 * (x * y - w * z)
    R[..., 0, 2] = 2 * (x * z + w * y)
    R[..., 1, 0] = 2 * (x * y + w * z)
    R[..., 1, 1] = 1 - 2 * (x * x + z * z)
    R[..., 1, 2] = 2 * (y * z - w * x)
    R[..., 2, 0] = 2 * (x * z - w * y)
    R[..., 2, 1] = 2 * (y * z + w * x)
    R[..., 2, 2] = 1 - 2 * (x * x + y * y)
    return R


def matrix_to_quat(R):
    """Rotation matrix to canonical (w >= 0) unit quaternion.

    Uses the max-diagonal branch selection, stable for all rotations
    including angles near pi.
    """
    R = np.asarray(R, dtype=float)
    batch = R.shape[:-2]
    Rf = R.reshape((-1, 3, 3))
    n = Rf.shape[0]
    q = np.empty((n, 4))

    tr = np.trace(Rf, axis1=-2, axis2=-1)
    # candidate discriminants for w, x, y, z branches
    cand = np.stack([tr, Rf[:, 0, 0], Rf[:, 1, 1], Rf[:, 2, 2]], axis=-1)
    branch = np.argmax(cand, axis=-1)

    m = branch == 0
    if m.any():
        s = np.sqrt(tr[m] + 1.0) * 2.0
        q[m, 0] = 0.25 * s
        q[m, 1] = (Rf[m, 2, 1] - Rf[m, 1, 2]) / s
        q[m, 2] = (Rf[m, 0, 2] - Rf[m, 2, 0]) / s
        q[m, 3] = (Rf[m, 1, 0] - Rf[m, 0, 1]) / s
    m = branch == 1
    if m.any():
        s = np.sqrt(1.0 + Rf[m, 0, 0] - Rf[m, 1, 1] - Rf[m, 2, 2]) * 2.0
        q[m, 0] = (Rf[m, 2, 1] - Rf[m, 1, 2]) / s
        q[m, 1] = 0.25 * s
        q[m, 2] = (Rf[m, 0, 1] + Rf[m, 1, 0]) / s
        q[m, 3] = (Rf[m, 0, 2] + Rf[m, 2, 0]) / s
    m = branch == 2
    if m.any():
        s = np.sqrt(1.0 + Rf[m, 1, 1] - Rf[m, 0, 0] - Rf[m, 2, 2]) * 2.0
        q[m, 0] = (Rf[m, 0, 2] - Rf[m, 2, 0]) / s
        q[m, 1] = (Rf[m, 0, 1] + Rf[m, 1, 0]) / s
        q[m, 2] = 0.25 * s
        q[m, 3] = (Rf[m, 1, 2] + Rf[m, 2, 1]) / s
    m = branch == 3
    if m.any():
        s = np.sqrt(1.0 + Rf[m, 2, 2] - Rf[m, 0, 0] - Rf[m, 1, 1]) * 2.0
        q[m, 0] = (Rf[m, 1, 0] - Rf[m, 0, 1]) / s
        q[m, 1] = (Rf[m, 0, 2] + Rf[m, 2, 0]) / s
        q[m, 2] = (Rf[m, 1, 2] + Rf[m, 2, 1]) / s
        q[m, 3] = 0.25 * s

    return quat_canonical(quat_normalize(q)).reshape(batch + (4,))


def axis_angle_to_matrix(v):
    """Rodrigues formula; the zero vector maps to the identity."""
    v = np.asarray(v, dtype=float)
    theta = np.linalg.norm(v, axis=-1, keepdims=True)
    small = theta < 1e-12
    axis = np.where(small, 0.0, v / np.where(small, 1.0, theta))
    K = skew(axis)
    th = theta[..., None]
    eye = identity_matrix(v.shape[:-1])
    return eye + np.sin(th) * K + (1.0 - np.cos(th)) * (K @ K)


def matrix_to_axis_angle(R):
    """Log map of SO(3): rotation vector with angle in [0, pi]."""
    q = matrix_to_quat(R)
    w = np.clip(q[..., 0], -1.0, 1.0)
    vec = q[..., 1:]
    nv = np.linalg.norm(vec, axis=-1, keepdims=True)
    angle = 2.0 * np.arctan2(nv[..., 0], w)
    small = nv < 1e-12
    axis = np.where(small, 0.0, vec / np.where(small, 1.0, nv))
    return axis * angle[..., None]


def skew(v):
    """Cross-product matrix: skew(v) @ u == cross(v, u)."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def quat_distance(q1, q2, tol=1e-6):
    """Orientation distance 1 - |q1 . q2|, in [0, 1], sign-flip invariant."""
    q1 = np.asarray(q1, dtype=float)
    q2 = np.asarray(q2, dtype=float)
    for q in (q1, q2):
        norm = np.linalg.norm(q, axis=-1)
        if (np.abs(norm - 1.0) > tol).any():
            raise NonUnitQuaternion(
                f"quaternion norm deviates from 1 by more than {tol}"
            )
    dot = np.abs(np.sum(q1 * q2, axis=-1))
    return np.clip(1.0 - dot, 0.0, 1.0)


def random_rotation(rng, size=None):
    """Uniform random rotation matrices (via normalized Gaussian quaternions)."""
    shape = (4,) if size is None else (size, 4)
    q = rng.standard_normal(shape)
    return quat_to_matrix(quat_normalize(q))
