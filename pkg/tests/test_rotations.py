import numpy as np
import pytest

from chairpose.errors import DegenerateInput, NonUnitQuaternion
from chairpose import rotations as rot


def gram_schmidt_oracle(r):
    """Independent re-derivation of the 6D decode, column by column."""
    a = np.array(r[:3], dtype=float)
    b = np.array(r[3:], dtype=float)
    c1 = a / np.linalg.norm(a)
    b = b - np.dot(c1, b) * c1
    c2 = b / np.linalg.norm(b)
    c3 = np.cross(c1, c2)
    return np.column_stack([c1, c2, c3])


def test_rot6d_identity():
    R = rot.rot6d_to_matrix([1, 0, 0, 0, 1, 0])
    assert np.allclose(R, np.eye(3), atol=1e-12)


def test_rot6d_z_rotation():
    # columns (0,1,0) and (-1,0,0) are the first two columns of Rz(90 deg)
    R = rot.rot6d_to_matrix([0, 1, 0, -1, 0, 0])
    expected = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    assert np.allclose(R, expected, atol=1e-12)


def test_rot6d_projection_removes_first_component():
    # (2,0,0, 1,1,0): the second column loses its e1 part -> columns e1, e2, e3
    R = rot.rot6d_to_matrix([2, 0, 0, 1, 1, 0])
    assert np.allclose(R, np.eye(3), atol=1e-12)
    assert np.allclose(R, gram_schmidt_oracle([2, 0, 0, 1, 1, 0]), atol=1e-12)


def test_rot6d_matches_oracle_on_random_inputs():
    rng = np.random.default_rng(7)
    for _ in range(200):
        r = rng.normal(size=6)
        R = rot.rot6d_to_matrix(r)
        assert np.allclose(R, gram_schmidt_oracle(r), atol=1e-10)
        # output is in SO(3) even for non-orthogonal input
        assert np.abs(R.T @ R - np.eye(3)).max() < 1e-9
        assert abs(np.linalg.det(R) - 1.0) < 1e-9


def test_rot6d_degenerate_inputs():
    with pytest.raises(DegenerateInput):
        rot.rot6d_to_matrix([0, 0, 0, 0, 1, 0])
    with pytest.raises(DegenerateInput):
        rot.rot6d_to_matrix([1, 0, 0, 1e-12, 0, 0])  # parallel columns


def test_rot6d_roundtrip_trivial():
    assert np.allclose(rot.matrix_to_rot6d(np.eye(3)), [1, 0, 0, 0, 1, 0])
    Rz = rot.rot6d_to_matrix([0, 1, 0, -1, 0, 0])
    assert np.allclose(rot.matrix_to_rot6d(Rz), [0, 1, 0, -1, 0, 0], atol=1e-12)


def test_rot6d_roundtrip_1000_random_rotations():
    rng = np.random.default_rng(11)
    R = rot.random_rotation(rng, 1000)
    back = rot.rot6d_to_matrix(rot.matrix_to_rot6d(R))
    assert np.abs(back - R).max() < 1e-9


def test_quat_matrix_roundtrip():
    rng = np.random.default_rng(3)
    q = rot.quat_canonical(rot.quat_normalize(rng.standard_normal((500, 4))))
    back = rot.matrix_to_quat(rot.quat_to_matrix(q))
    assert np.abs(back - q).max() < 1e-9


def test_axis_angle_roundtrip():
    rng = np.random.default_rng(5)
    v = rng.normal(size=(300, 3))
    # keep angles within (0, pi) where the log map is unique
    v = v / np.linalg.norm(v, axis=1, keepdims=True) * rng.uniform(1e-4, 3.1, (300, 1))
    back = rot.matrix_to_axis_angle(rot.axis_angle_to_matrix(v))
    assert np.abs(back - v).max() < 1e-9
    assert np.allclose(rot.axis_angle_to_matrix(np.zeros(3)), np.eye(3))


def test_quat_distance_basics():
    q = rot.quat_normalize(np.array([1.0, 2.0, 0.5, -0.3]))
    assert rot.quat_distance(q, q) == 0.0
    assert rot.quat_distance(q, -q) == 0.0  # double cover
    assert rot.quat_distance([1, 0, 0, 0], [0, 1, 0, 0]) == 1.0


def test_quat_distance_sign_flip_invariance():
    rng = np.random.default_rng(9)
    q1 = rot.quat_normalize(rng.standard_normal((100, 4)))
    q2 = rot.quat_normalize(rng.standard_normal((100, 4)))
    d = rot.quat_distance(q1, q2)
    assert np.allclose(d, rot.quat_distance(-q1, q2))
    assert np.allclose(d, rot.quat_distance(q1, -q2))
    assert ((d >= 0) & (d <= 1)).all()


def test_quat_distance_rejects_non_unit():
    with pytest.raises(NonUnitQuaternion):
        rot.quat_distance([1.1, 0, 0, 0], [1, 0, 0, 0])
