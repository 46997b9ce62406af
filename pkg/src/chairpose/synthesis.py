"""Virtual IMU synthesis from motion and normalization into model inputs.

Acceleration of a virtual sensor is the smoothed central second difference
of its global position,

    a(t) = (x(t - n) + x(t + n) - 2 x(t)) / (n * dt)^2,

with a smoothing radius of n frames (default 4).  The n boundary frames on
each side are trimmed rather than padded, so the output is 2n frames shorter
than the motion.  Synthetic trajectories carry no gravity term because the
measurements stand for gravity-subtracted linear acceleration.

Normalization expresses the leaf sensors relative to the wheelchair/pelvis
sensor and packs everything into a 48-vector:

    a~_leaf = R_pelvis^-1 (a_leaf - a_pelvis)     R~_leaf = R_pelvis^-1 R_leaf
    a~_pelvis = R_pelvis^-1 a_pelvis              R~_pelvis = R_pelvis

packed as [a~_pelvis, a~_larm, a~_rarm, a~_head, vec(R~_pelvis),
vec(R~_larm), vec(R~_rarm), vec(R~_head)] with row-major matrices.
"""

from dataclasses import dataclass

import numpy as np

from .errors import SequenceTooShort, ShapeMismatch
from .imu import NUM_SENSORS, SENSORS, ImuSequence
from .rotations import axis_angle_to_matrix, matrix_to_quat, quat_to_matrix
from .skeleton import Pose, forward_kinematics_sequence

INPUT_DIM = 48
DEFAULT_SMOOTHING = 4


@dataclass
class MotionSequence:
    """A pose trajectory sampled on a fixed-rate grid."""

    frame_rate: float
    rotations: np.ndarray       # (T, J, 3, 3) local joint rotations
    root_positions: np.ndarray  # (T, 3) meters
    subject_tag: str = ""

    def __post_init__(self):
        if self.rotations.ndim != 4 or self.root_positions.shape != (
            self.rotations.shape[0],
            3,
        ):
            raise ShapeMismatch(
                f"motion arrays have shapes {self.rotations.shape}, "
                f"{self.root_positions.shape}"
            )

    def __len__(self):
        return self.rotations.shape[0]

    @property
    def num_joints(self):
        return self.rotations.shape[1]

    def pose(self, t):
        return Pose(self.rotations[t], self.root_positions[t])


def sensor_trajectories(model, motion):
    """Global positions and orientations of the attached virtual sensors.

    Returns (T, 4, 3) positions and (T, 4, 3, 3) orientations in sensor order.
    """
    R, p = forward_kinematics_sequence(model, motion.rotations, motion.root_positions)
    T = len(motion)
    pos = np.empty((T, NUM_SENSORS, 3))
    rot = np.empty((T, NUM_SENSORS, 3, 3))
    for s, name in enumerate(SENSORS):
        j = model.sensor_joints[name]
        off = model.sensor_offsets[name]
        pos[:, s] = p[:, j] + (R[:, j] @ off)
        rot[:, s] = R[:, j]
    return pos, rot


def synthesize_imu(model, motion, n=DEFAULT_SMOOTHING):
    """Virtual IMU measurements for a motion; output has len(motion) - 2n frames."""
    T = len(motion)
    if T < 2 * n + 1:
        raise SequenceTooShort(
            f"need at least {2 * n + 1} frames for smoothing radius {n}, got {T}"
        )
    pos, rot = sensor_trajectories(model, motion)
    dt = 1.0 / motion.frame_rate
    acc = (pos[: T - 2 * n] + pos[2 * n :] - 2.0 * pos[n : T - n]) / (n * dt) ** 2
    # quantize orientations through the quaternion form used on disk so that
    # in-memory sequences match their file round-trip exactly
    quat = matrix_to_quat(rot[n : T - n])
    timestamps = np.arange(n, T - n) * dt
    return ImuSequence(
        motion.frame_rate, acc, quat_to_matrix(quat), timestamps, rot_quat=quat
    )


def add_imu_noise(seq, accel_std=0.0, orientation_std_deg=0.0, seed=0):
    """Optional additive Gaussian measurement noise (accel m/s^2, rotation deg)."""
    rng = np.random.default_rng(seed)
    acc = seq.acc.copy()
    rot = seq.rot.copy()
    if accel_std > 0.0:
        acc += rng.normal(0.0, accel_std, acc.shape)
    if orientation_std_deg > 0.0:
        wobble = rng.normal(
            0.0, np.deg2rad(orientation_std_deg), (len(seq), NUM_SENSORS, 3)
        )
        rot = axis_angle_to_matrix(wobble) @ rot
    return ImuSequence(seq.frame_rate, acc, rot, seq.timestamps.copy())


def normalize_arrays(acc, rot):
    """Normalize (..., 4, 3) accelerations and (..., 4, 3, 3) orientations."""
    acc = np.asarray(acc, dtype=float)
    rot = np.asarray(rot, dtype=float)
    rp_inv = np.swapaxes(rot[..., 0, :, :], -1, -2)
    acc_n = np.empty_like(acc)
    rot_n = np.empty_like(rot)
    acc_n[..., 0, :] = (rp_inv @ acc[..., 0, :, None])[..., 0]
    rot_n[..., 0, :, :] = rot[..., 0, :, :]
    for s in range(1, NUM_SENSORS):
        rel = acc[..., s, :] - acc[..., 0, :]
        acc_n[..., s, :] = (rp_inv @ rel[..., None])[..., 0]
        rot_n[..., s, :, :] = rp_inv @ rot[..., s, :, :]
    flat_acc = acc_n.reshape(acc.shape[:-2] + (12,))
    flat_rot = rot_n.reshape(rot.shape[:-3] + (36,))
    return np.concatenate([flat_acc, flat_rot], axis=-1)


def normalize_frame(frame):
    """48-vector model input for one IMU frame."""
    return normalize_arrays(frame.acc, frame.rot)


def normalize_sequence(seq):
    """(T, 48) model inputs for an IMU sequence."""
    return normalize_arrays(seq.acc, seq.rot)
