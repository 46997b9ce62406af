"""IMU measurement containers.

Four sensors, in fixed order: the wheelchair/pelvis sensor, both forearms,
and the head.  Accelerations are gravity-subtracted linear accelerations in
m/s^2; orientations are rotation matrices.  Both live in a shared global
frame once calibrated.
"""

from dataclasses import dataclass

import numpy as np

from .errors import LengthMismatch, ShapeMismatch
from .rotations import check_orthonormal, matrix_to_quat

SENSORS = ("pelvis_or_chair", "left_forearm", "right_forearm", "head")
NUM_SENSORS = len(SENSORS)
PELVIS, LEFT_FOREARM, RIGHT_FOREARM, HEAD = range(NUM_SENSORS)


@dataclass
class ImuFrame:
    acc: np.ndarray        # (4, 3) m/s^2
    rot: np.ndarray        # (4, 3, 3)
    timestamp: float = 0.0

    def validate(self, tol=1e-6):
        if self.acc.shape != (NUM_SENSORS, 3) or self.rot.shape != (NUM_SENSORS, 3, 3):
            raise ShapeMismatch(
                f"IMU frame arrays have shapes {self.acc.shape}, {self.rot.shape}"
            )
        check_orthonormal(self.rot, tol, "IMU orientation")


@dataclass
class ImuSequence:
    frame_rate: float
    acc: np.ndarray         # (T, 4, 3)
    rot: np.ndarray         # (T, 4, 3, 3)
    timestamps: np.ndarray  # (T,) seconds
    # canonical quaternion form of `rot`; kept alongside the matrices so the
    # on-disk representation round-trips bit-exactly
    rot_quat: np.ndarray = None

    def __post_init__(self):
        T = len(self.timestamps)
        if self.acc.shape != (T, NUM_SENSORS, 3) or self.rot.shape != (T, NUM_SENSORS, 3, 3):
            raise ShapeMismatch(
                f"IMU sequence arrays have shapes {self.acc.shape}, {self.rot.shape}"
                f" for {T} timestamps"
            )
        if self.rot_quat is None:
            self.rot_quat = matrix_to_quat(self.rot)

    def __len__(self):
        return len(self.timestamps)

    def frame(self, t):
        return ImuFrame(self.acc[t], self.rot[t], float(self.timestamps[t]))

    def copy(self):
        return ImuSequence(
            self.frame_rate,
            self.acc.copy(),
            self.rot.copy(),
            self.timestamps.copy(),
            self.rot_quat.copy(),
        )


def check_same_length(a, b):
    if len(a) != len(b):
        raise LengthMismatch(f"sequences have lengths {len(a)} and {len(b)}")
