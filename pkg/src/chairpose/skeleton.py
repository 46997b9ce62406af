"""Kinematic skeleton, forward kinematics, and the proxy body mesh.

The skeleton is a fixed 24-joint chain in the usual parametric-body-model
joint order, with hand-specified rest offsets (meters).  Axes follow the
body-centric convention: x points left, y up, z forward.  A proxy vertex
cloud (8 rigidly attached points per upper-body joint) stands in for a full
skinned mesh when computing mesh error and placing virtual sensors.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeMismatch
from .rotations import identity_matrix

SKELETON_FORMAT = "chairpose-skeleton"
SKELETON_VERSION = 1

# name, parent name (None for root), rest offset from parent (m)
_JOINT_TABLE = [
    ("pelvis", None, (0.0, 0.0, 0.0)),
    ("left_hip", "pelvis", (0.09, -0.06, 0.0)),
    ("right_hip", "pelvis", (-0.09, -0.06, 0.0)),
    ("spine1", "pelvis", (0.0, 0.11, 0.0)),
    ("left_knee", "left_hip", (0.0, -0.42, 0.0)),
    ("right_knee", "right_hip", (0.0, -0.42, 0.0)),
    ("spine2", "spine1", (0.0, 0.13, 0.0)),
    ("left_ankle", "left_knee", (0.0, -0.41, 0.0)),
    ("right_ankle", "right_knee", (0.0, -0.41, 0.0)),
    ("spine3", "spine2", (0.0, 0.05, 0.0)),
    ("left_foot", "left_ankle", (0.0, -0.06, 0.12)),
    ("right_foot", "right_ankle", (0.0, -0.06, 0.12)),
    ("neck", "spine3", (0.0, 0.21, 0.0)),
    ("left_collar", "spine3", (0.07, 0.12, 0.0)),
    ("right_collar", "spine3", (-0.07, 0.12, 0.0)),
    ("head", "neck", (0.0, 0.09, 0.0)),
    ("left_shoulder", "left_collar", (0.10, 0.04, 0.0)),
    ("right_shoulder", "right_collar", (-0.10, 0.04, 0.0)),
    ("left_elbow", "left_shoulder", (0.26, 0.0, 0.0)),
    ("right_elbow", "right_shoulder", (-0.26, 0.0, 0.0)),
    ("left_wrist", "left_elbow", (0.25, 0.0, 0.0)),
    ("right_wrist", "right_elbow", (-0.25, 0.0, 0.0)),
    ("left_hand", "left_wrist", (0.08, 0.0, 0.0)),
    ("right_hand", "right_wrist", (-0.08, 0.0, 0.0)),
]

# The 16 joints predicted by the kinematics module.  The source system does
# not enumerate this set, so it is fixed here as a config constant: the hips
# are included (they carry the thighs of the seated pose and couple to the
# seat contacts); knees, ankles, feet and hands are excluded.
UPPER_BODY_JOINTS = (
    "pelvis",
    "left_hip",
    "right_hip",
    "spine1",
    "spine2",
    "spine3",
    "neck",
    "left_collar",
    "right_collar",
    "head",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
)

# sensor id -> (joint, local offset).  Forearm sensors sit on the segment
# rotated by the elbow joint; the chair sensor stands in for the pelvis.
_SENSOR_TABLE = {
    "pelvis_or_chair": ("pelvis", (0.0, -0.05, -0.12)),
    "left_forearm": ("left_elbow", (0.12, 0.0, 0.02)),
    "right_forearm": ("right_elbow", (-0.12, 0.0, 0.02)),
    "head": ("head", (0.0, 0.05, -0.09)),
}

_PROXY_HALF_EXTENT = 0.05
_PROXY_CORNERS = np.array(
    [(sx, sy, sz) for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
    dtype=float,
) * _PROXY_HALF_EXTENT


@dataclass(frozen=True)
class KinematicModel:
    """Joint hierarchy with rest offsets, sensor attachments, proxy vertices."""

    joint_names: tuple
    parents: np.ndarray          # (J,) int, -1 for the root
    offsets: np.ndarray          # (J, 3) rest offsets from parent, meters
    upper_body: np.ndarray       # (16,) joint indices predicted by the model
    sensor_joints: dict          # sensor id -> joint index
    sensor_offsets: dict         # sensor id -> (3,) local offset
    vertex_joints: np.ndarray    # (V,) joint index per proxy vertex
    vertex_offsets: np.ndarray   # (V, 3) local offsets

    def __post_init__(self):
        n = len(self.joint_names)
        if (self.parents < 0).sum() != 1 or self.parents[0] != -1:
            raise ConfigError("skeleton must have exactly one root at index 0")
        for j in range(1, n):
            if not 0 <= self.parents[j] < j:
                raise ConfigError(
                    f"joint {self.joint_names[j]} breaks topological order"
                )
        if len(self.upper_body) == 0 or not all(
            0 <= j < n for j in self.upper_body
        ):
            raise ConfigError("upper_body must list valid joint indices")
        for sensor, j in self.sensor_joints.items():
            if not 0 <= j < n:
                raise ConfigError(f"sensor {sensor} attaches to missing joint")

    def require_full_output_set(self):
        """The pose pipeline predicts exactly 16 upper-body joints."""
        if len(self.upper_body) != 16:
            raise ConfigError(
                f"model lists {len(self.upper_body)} upper-body joints; "
                "the pose pipeline requires exactly 16"
            )

    @property
    def num_joints(self):
        return len(self.joint_names)

    def index(self, name):
        try:
            return self.joint_names.index(name)
        except ValueError:
            raise ConfigError(f"unknown joint name: {name}") from None

    def children(self, j):
        return np.flatnonzero(self.parents == j)


@dataclass
class Pose:
    """Per-joint local rotations plus the root position (origin by default)."""

    rotations: np.ndarray                       # (J, 3, 3)
    root_position: np.ndarray = field(
        default_factory=lambda: np.zeros(3)
    )

    def copy(self):
        return Pose(self.rotations.copy(), self.root_position.copy())


def identity_pose(model):
    return Pose(identity_matrix((model.num_joints,)))


def pose_from_upper(model, upper_rotations, root_position=None):
    """Expand upper-body rotations into a full pose (identity elsewhere)."""
    upper_rotations = np.asarray(upper_rotations, dtype=float)
    want = (len(model.upper_body), 3, 3)
    if upper_rotations.shape != want:
        raise ShapeMismatch(
            f"expected {want} rotations, got {upper_rotations.shape}"
        )
    pose = identity_pose(model)
    pose.rotations[model.upper_body] = upper_rotations
    if root_position is not None:
        pose.root_position = np.asarray(root_position, dtype=float)
    return pose


def _default_proxy_vertices(names, parents, offsets):
    """8 box corners per upper joint, centered halfway toward its children."""
    name_to_idx = {n: i for i, n in enumerate(names)}
    vjoints, voffsets = [], []
    for name in UPPER_BODY_JOINTS:
        j = name_to_idx[name]
        child_offsets = [offsets[k] for k in range(len(names)) if parents[k] == j]
        center = np.mean(child_offsets, axis=0) / 2.0 if child_offsets else np.zeros(3)
        for corner in _PROXY_CORNERS:
            vjoints.append(j)
            voffsets.append(center + corner)
    return np.array(vjoints), np.array(voffsets)


def default_model():
    names = tuple(row[0] for row in _JOINT_TABLE)
    name_to_idx = {n: i for i, n in enumerate(names)}
    parents = np.array(
        [-1 if row[1] is None else name_to_idx[row[1]] for row in _JOINT_TABLE]
    )
    offsets = np.array([row[2] for row in _JOINT_TABLE], dtype=float)
    upper = np.array([name_to_idx[n] for n in UPPER_BODY_JOINTS])
    sensor_joints = {s: name_to_idx[j] for s, (j, _) in _SENSOR_TABLE.items()}
    sensor_offsets = {
        s: np.array(off, dtype=float) for s, (_, off) in _SENSOR_TABLE.items()
    }
    vjoints, voffsets = _default_proxy_vertices(names, parents, offsets)
    return KinematicModel(
        joint_names=names,
        parents=parents,
        offsets=offsets,
        upper_body=upper,
        sensor_joints=sensor_joints,
        sensor_offsets=sensor_offsets,
        vertex_joints=vjoints,
        vertex_offsets=voffsets,
    )


def forward_kinematics(model, pose):
    """Global rotations and positions for every joint.

    ``R_glob[j] = R_glob[parent] @ R_local[j]`` and
    ``p[j] = p[parent] + R_glob[parent] @ offset[j]``; the root takes the
    pose's root position and its own local rotation.
    """
    rot = np.asarray(pose.rotations, dtype=float)
    if rot.shape != (model.num_joints, 3, 3):
        raise ShapeMismatch(
            f"pose has {rot.shape} rotations for a "
            f"{model.num_joints}-joint model"
        )
    R = np.empty_like(rot)
    p = np.empty((model.num_joints, 3))
    R[0] = rot[0]
    p[0] = pose.root_position
    for j in range(1, model.num_joints):
        par = model.parents[j]
        R[j] = R[par] @ rot[j]
        p[j] = p[par] + R[par] @ model.offsets[j]
    return R, p


def forward_kinematics_sequence(model, rotations, root_positions=None):
    """Vectorized FK over a whole sequence: (T, J, 3, 3) -> (T, J, 3, 3), (T, J, 3)."""
    rotations = np.asarray(rotations, dtype=float)
    T = rotations.shape[0]
    if root_positions is None:
        root_positions = np.zeros((T, 3))
    R = np.empty_like(rotations)
    p = np.empty((T, model.num_joints, 3))
    R[:, 0] = rotations[:, 0]
    p[:, 0] = root_positions
    for j in range(1, model.num_joints):
        par = model.parents[j]
        R[:, j] = R[:, par] @ rotations[:, j]
        p[:, j] = p[:, par] + (R[:, par] @ model.offsets[j])
    return R, p


def proxy_mesh_positions(model, pose):
    """Global positions of the proxy vertex cloud for one pose."""
    R, p = forward_kinematics(model, pose)
    Rv = R[model.vertex_joints]
    return p[model.vertex_joints] + (Rv @ model.vertex_offsets[..., None])[..., 0]


def proxy_mesh_sequence(model, rotations, root_positions=None):
    R, p = forward_kinematics_sequence(model, rotations, root_positions)
    Rv = R[:, model.vertex_joints]
    off = model.vertex_offsets[..., None]
    return p[:, model.vertex_joints] + (Rv @ off)[..., 0]


def skeleton_to_text(model):
    """Serialize a model to the versioned skeleton config format."""
    def fmt(vec):
        return " ".join(repr(float(v)) for v in vec)

    lines = [f"{SKELETON_FORMAT} {SKELETON_VERSION}"]
    for j, name in enumerate(model.joint_names):
        parent = "-" if model.parents[j] < 0 else model.joint_names[model.parents[j]]
        lines.append(f"joint {name} {parent} {fmt(model.offsets[j])}")
    lines.append("upper " + " ".join(model.joint_names[j] for j in model.upper_body))
    for sensor, j in model.sensor_joints.items():
        lines.append(f"sensor {sensor} {model.joint_names[j]} {fmt(model.sensor_offsets[sensor])}")
    for j, off in zip(model.vertex_joints, model.vertex_offsets):
        lines.append(f"vertex {model.joint_names[j]} {fmt(off)}")
    return "\n".join(lines) + "\n"


def skeleton_from_text(text):
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ConfigError("empty skeleton config")
    header = lines[0].split()
    if header[0] != SKELETON_FORMAT or int(header[1]) != SKELETON_VERSION:
        raise ConfigError(f"unsupported skeleton header: {lines[0]!r}")

    names, parents, offsets = [], [], []
    upper_names = None
    sensor_joints, sensor_offsets = {}, {}
    vjoints, voffsets = [], []
    name_to_idx = {}
    for ln in lines[1:]:
        parts = ln.split()
        kind = parts[0]
        if kind == "joint":
            name, parent = parts[1], parts[2]
            name_to_idx[name] = len(names)
            names.append(name)
            parents.append(-1 if parent == "-" else name_to_idx[parent])
            offsets.append([float(v) for v in parts[3:6]])
        elif kind == "upper":
            upper_names = parts[1:]
        elif kind == "sensor":
            sensor_joints[parts[1]] = name_to_idx[parts[2]]
            sensor_offsets[parts[1]] = np.array([float(v) for v in parts[3:6]])
        elif kind == "vertex":
            vjoints.append(name_to_idx[parts[1]])
            voffsets.append([float(v) for v in parts[2:5]])
        else:
            raise ConfigError(f"unknown skeleton record: {ln!r}")
    if upper_names is None:
        raise ConfigError("skeleton config has no 'upper' record")
    return KinematicModel(
        joint_names=tuple(names),
        parents=np.array(parents),
        offsets=np.array(offsets, dtype=float),
        upper_body=np.array([name_to_idx[n] for n in upper_names]),
        sensor_joints=sensor_joints,
        sensor_offsets=sensor_offsets,
        vertex_joints=np.array(vjoints),
        vertex_offsets=np.array(voffsets, dtype=float),
    )


def load_skeleton(path):
    with open(path, "r", encoding="utf-8") as f:
        return skeleton_from_text(f.read())


def save_skeleton(model, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(skeleton_to_text(model))
