"""Sensor-to-bone and heading calibration from a single reference frame.

The user holds a known reference pose (T-pose by default) while one frame is
captured.  The wheelchair/pelvis sensor fixes the heading rotation between
the sensor-global frame and the model-global frame; each sensor then gets a
mounting offset that maps its readings onto its bone:

    R_heading = R_bone_ref[chair] @ R_raw[chair]^T
    R_offset[s] = (R_heading @ R_raw[s])^T @ R_bone_ref[s]

Applying the calibration maps raw measurements into the model frame:
orientations become ``R_heading @ R_raw @ R_offset`` and accelerations are
rotated by ``R_heading``.  Accelerations pass through rotation only; no bias
correction is applied.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .imu import SENSORS, ImuFrame, ImuSequence
from .rotations import check_orthonormal
from .skeleton import forward_kinematics

CALIBRATION_FORMAT = "chairpose-calibration"
CALIBRATION_VERSION = 1
REFERENCE_SENSOR = "pelvis_or_chair"


@dataclass(frozen=True)
class CalibrationResult:
    offsets: dict      # sensor id -> (3, 3) sensor-to-bone rotation
    headings: dict     # sensor id -> (3, 3) sensor-global to model-global
    timestamp: float = 0.0


def bone_rotations(model, pose):
    """Global rotation of each sensor's attachment joint under `pose`."""
    R, _ = forward_kinematics(model, pose)
    return {s: R[model.sensor_joints[s]] for s in SENSORS}


def compute_calibration(cal_frame, reference_pose, model):
    """Calibration from one raw frame captured in the reference pose."""
    check_orthonormal(cal_frame.rot, 1e-6, "calibration frame orientation")
    bones = bone_rotations(model, reference_pose)
    ref_idx = SENSORS.index(REFERENCE_SENSOR)
    heading = bones[REFERENCE_SENSOR] @ cal_frame.rot[ref_idx].T
    offsets, headings = {}, {}
    for s, name in enumerate(SENSORS):
        offsets[name] = (heading @ cal_frame.rot[s]).T @ bones[name]
        headings[name] = heading.copy()
    return CalibrationResult(offsets, headings, float(cal_frame.timestamp))


def recalibrate_heading(cal, frame, bone_rotation):
    """Recompute the heading so `frame`'s reference sensor maps onto a known
    bone orientation (per-session drift compensation from frame 0)."""
    ref_idx = SENSORS.index(REFERENCE_SENSOR)
    heading = bone_rotation @ (frame.rot[ref_idx] @ cal.offsets[REFERENCE_SENSOR]).T
    return CalibrationResult(
        {s: R.copy() for s, R in cal.offsets.items()},
        {s: heading.copy() for s in SENSORS},
        float(frame.timestamp),
    )


def apply_calibration(cal, frame):
    """Map one raw frame into the model-global frame."""
    rot = np.empty_like(frame.rot)
    acc = np.empty_like(frame.acc)
    for s, name in enumerate(SENSORS):
        rot[s] = cal.headings[name] @ frame.rot[s] @ cal.offsets[name]
        acc[s] = cal.headings[name] @ frame.acc[s]
    return ImuFrame(acc, rot, frame.timestamp)


def apply_calibration_sequence(cal, seq):
    rot = np.empty_like(seq.rot)
    acc = np.empty_like(seq.acc)
    for s, name in enumerate(SENSORS):
        rot[:, s] = cal.headings[name] @ seq.rot[:, s] @ cal.offsets[name]
        acc[:, s] = (cal.headings[name] @ seq.acc[:, s, :, None])[..., 0]
    return ImuSequence(seq.frame_rate, acc, rot, seq.timestamps.copy())


def calibration_to_text(cal):
    lines = [
        f"{CALIBRATION_FORMAT} {CALIBRATION_VERSION}",
        f"timestamp {cal.timestamp!r}",
    ]
    for kind, table in (("offset", cal.offsets), ("heading", cal.headings)):
        for sensor in SENSORS:
            vals = " ".join(repr(float(v)) for v in table[sensor].ravel())
            lines.append(f"{kind} {sensor} {vals}")
    return "\n".join(lines) + "\n"


def calibration_from_text(text):
    lines = [ln for ln in text.splitlines() if ln.strip()]
    header = lines[0].split()
    if header[0] != CALIBRATION_FORMAT or int(header[1]) != CALIBRATION_VERSION:
        raise DataError(f"unsupported calibration header: {lines[0]!r}")
    timestamp = float(lines[1].split()[1])
    offsets, headings = {}, {}
    for ln in lines[2:]:
        parts = ln.split()
        mat = np.array([float(v) for v in parts[2:11]]).reshape(3, 3)
        {"offset": offsets, "heading": headings}[parts[0]][parts[1]] = mat
    if set(offsets) != set(SENSORS) or set(headings) != set(SENSORS):
        raise DataError("calibration record is missing sensors")
    return CalibrationResult(offsets, headings, timestamp)


def save_calibration(path, cal):
    with open(path, "w", encoding="utf-8") as f:
        f.write(calibration_to_text(cal))


def load_calibration(path):
    with open(path, "r", encoding="utf-8") as f:
        return calibration_from_text(f.read())
