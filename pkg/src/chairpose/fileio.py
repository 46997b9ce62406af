"""Line-delimited text formats for motion and IMU recordings.

Motion file (version 1)::

    chairpose-motion 1
    frame_rate 60.0
    joints 24
    names pelvis left_hip ... right_hand
    tag arm
    root_motion 0|1
    <frame lines>

Each frame line carries per-joint local quaternions ``w x y z`` in joint
order; when ``root_motion`` is 1 the line is prefixed by the root position
``x y z``.  IMU file (version 1)::

    chairpose-imu 1
    frame_rate 60.0
    sensors pelvis_or_chair left_forearm right_forearm head
    <frame lines>

Each frame line is ``timestamp`` followed, per sensor, by ``ax ay az`` and
the orientation quaternion ``w x y z``.  Floats are written with shortest
round-trip repr, so parsing recovers the exact values.
"""

import numpy as np

from .errors import DataError
from .imu import SENSORS, ImuSequence
from .rotations import matrix_to_quat, quat_to_matrix
from .synthesis import MotionSequence

MOTION_FORMAT = "chairpose-motion"
IMU_FORMAT = "chairpose-imu"
FORMAT_VERSION = 1


def _fmt(values):
    return " ".join(repr(float(v)) for v in values)


def motion_to_text(motion, joint_names=None):
    T, J = len(motion), motion.num_joints
    if joint_names is None:
        joint_names = [f"joint{j}" for j in range(J)]
    has_root = bool(np.any(motion.root_positions != 0.0))
    lines = [
        f"{MOTION_FORMAT} {FORMAT_VERSION}",
        f"frame_rate {motion.frame_rate!r}",
        f"joints {J}",
        "names " + " ".join(joint_names),
        f"tag {motion.subject_tag}" if motion.subject_tag else "tag -",
        f"root_motion {int(has_root)}",
    ]
    quat = matrix_to_quat(motion.rotations).reshape(T, 4 * J)
    for t in range(T):
        row = quat[t]
        if has_root:
            lines.append(_fmt(motion.root_positions[t]) + " " + _fmt(row))
        else:
            lines.append(_fmt(row))
    return "\n".join(lines) + "\n"


def motion_from_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        fmt, version = lines[0].split()
        if fmt != MOTION_FORMAT or int(version) != FORMAT_VERSION:
            raise ValueError
        frame_rate = float(lines[1].split()[1])
        num_joints = int(lines[2].split()[1])
        names = lines[3].split()[1:]
        tag = lines[4].split(maxsplit=1)[1]
        tag = "" if tag == "-" else tag
        has_root = bool(int(lines[5].split()[1]))
    except (ValueError, IndexError) as exc:
        raise DataError(f"malformed motion file header: {exc}") from exc
    if len(names) != num_joints:
        raise DataError("joint name count disagrees with joint count")

    body = lines[6:]
    expected = (3 if has_root else 0) + 4 * num_joints
    rows = np.empty((len(body), expected))
    for t, ln in enumerate(body):
        vals = ln.split()
        if len(vals) != expected:
            raise DataError(f"motion frame {t} has {len(vals)} fields, expected {expected}")
        rows[t] = [float(v) for v in vals]
    if has_root:
        root = rows[:, :3]
        quat = rows[:, 3:]
    else:
        root = np.zeros((len(body), 3))
        quat = rows
    rot = quat_to_matrix(quat.reshape(len(body), num_joints, 4))
    return MotionSequence(frame_rate, rot, root, tag), names


def save_motion(path, motion, joint_names=None):
    with open(path, "w", encoding="utf-8") as f:
        f.write(motion_to_text(motion, joint_names))


def load_motion(path):
    with open(path, "r", encoding="utf-8") as f:
        motion, _ = motion_from_text(f.read())
    return motion


def imu_to_text(seq):
    lines = [
        f"{IMU_FORMAT} {FORMAT_VERSION}",
        f"frame_rate {seq.frame_rate!r}",
        "sensors " + " ".join(SENSORS),
    ]
    for t in range(len(seq)):
        parts = [repr(float(seq.timestamps[t]))]
        for s in range(len(SENSORS)):
            parts.append(_fmt(seq.acc[t, s]))
            parts.append(_fmt(seq.rot_quat[t, s]))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def imu_from_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    try:
        fmt, version = lines[0].split()
        if fmt != IMU_FORMAT or int(version) != FORMAT_VERSION:
            raise ValueError
        frame_rate = float(lines[1].split()[1])
        sensors = tuple(lines[2].split()[1:])
    except (ValueError, IndexError) as exc:
        raise DataError(f"malformed IMU file header: {exc}") from exc
    if sensors != SENSORS:
        raise DataError(f"unexpected sensor list: {sensors}")

    body = lines[3:]
    T, S = len(body), len(SENSORS)
    timestamps = np.empty(T)
    acc = np.empty((T, S, 3))
    quat = np.empty((T, S, 4))
    expected = 1 + 7 * S
    for t, ln in enumerate(body):
        vals = [float(v) for v in ln.split()]
        if len(vals) != expected:
            raise DataError(f"IMU frame {t} has {len(vals)} fields, expected {expected}")
        timestamps[t] = vals[0]
        for s in range(S):
            base = 1 + 7 * s
            acc[t, s] = vals[base : base + 3]
            quat[t, s] = vals[base + 3 : base + 7]
    return ImuSequence(frame_rate, acc, quat_to_matrix(quat), timestamps, rot_quat=quat)


def save_imu(path, seq):
    with open(path, "w", encoding="utf-8") as f:
        f.write(imu_to_text(seq))


def load_imu(path):
    with open(path, "r", encoding="utf-8") as f:
        return imu_from_text(f.read())
