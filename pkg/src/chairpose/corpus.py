"""Synthetic desk-scale motion corpus.

Generates parameterized seated upper-body motions (arm raises at several
elevations, overhead reaches, torso leans and twists) and wheelchair
locomotion analogues (straight pushes, turns in place, combined arcs), each
tagged with one of the five motion categories used by the evaluation
breakdown.  All trajectories are built from minimum-jerk ramps so they start
and end at rest with zero velocity and acceleration.
"""

from dataclasses import dataclass

import numpy as np

from .rotations import axis_angle_to_matrix
from .synthesis import MotionSequence

MOTION_CATEGORIES = ("arm", "upper_body", "translation", "rotation", "combined")

_EX = np.array([1.0, 0.0, 0.0])
_EY = np.array([0.0, 1.0, 0.0])
_EZ = np.array([0.0, 0.0, 1.0])


@dataclass
class CorpusConfig:
    sequences_per_category: int = 2
    frames: int = 240
    frame_rate: float = 60.0
    categories: tuple = MOTION_CATEGORIES


def minimum_jerk(u):
    """C2 ease from 0 to 1 with zero velocity and acceleration at both ends."""
    u = np.clip(u, 0.0, 1.0)
    return u**3 * (10.0 - 15.0 * u + 6.0 * u * u)


def ramp_hold_return(T, rise_frac=0.3, hold_frac=0.3):
    """Profile going 0 -> 1 -> hold -> 0 over T frames."""
    t = np.arange(T) / max(T - 1, 1)
    up = minimum_jerk(t / rise_frac)
    down = minimum_jerk((1.0 - t) / (1.0 - rise_frac - hold_frac))
    return np.minimum(up, down)


def seated_rest_rotations(model):
    """Base seated posture: thighs forward, shanks down, arms hanging."""
    J = model.num_joints
    rot = np.broadcast_to(np.eye(3), (J, 3, 3)).copy()
    half = np.pi / 2
    rot[model.index("left_hip")] = axis_angle_to_matrix(-half * _EX)
    rot[model.index("right_hip")] = axis_angle_to_matrix(-half * _EX)
    rot[model.index("left_knee")] = axis_angle_to_matrix(half * _EX)
    rot[model.index("right_knee")] = axis_angle_to_matrix(half * _EX)
    rot[model.index("left_shoulder")] = axis_angle_to_matrix(-half * _EZ)
    rot[model.index("right_shoulder")] = axis_angle_to_matrix(half * _EZ)
    return rot


def _base_motion(model, cfg, tag):
    rot = np.tile(seated_rest_rotations(model), (cfg.frames, 1, 1, 1))
    pos = np.zeros((cfg.frames, 3))
    return MotionSequence(cfg.frame_rate, rot, pos, tag)


def _set_joint(motion, model, name, angles, axis, base=None):
    """Time-varying local rotation: R(t) = exp(angles[t] * axis) @ base."""
    j = model.index(name)
    R = axis_angle_to_matrix(np.outer(angles, axis))
    if base is None:
        base = motion.rotations[0, j]
    motion.rotations[:, j] = R @ base


def arm_raise_motion(model, cfg, elevation, sides=("left", "right"), tag="arm"):
    """Raise arm(s) sagittally to `elevation` radians above hanging, and lower."""
    motion = _base_motion(model, cfg, tag)
    phi = elevation * ramp_hold_return(cfg.frames)
    for side in sides:
        sign = -1.0 if side == "left" else 1.0
        base = axis_angle_to_matrix(sign * (np.pi / 2) * _EZ)
        _set_joint(motion, model, f"{side}_shoulder", -phi, _EX, base)
    return motion


def arm_swing_motion(model, cfg, amplitude, freq_hz, tag="arm"):
    """Alternating sagittal arm swings with an eased envelope."""
    motion = _base_motion(model, cfg, tag)
    t = np.arange(cfg.frames) / cfg.frame_rate
    env = ramp_hold_return(cfg.frames, rise_frac=0.2, hold_frac=0.6)
    for side, phase in (("left", 0.0), ("right", np.pi)):
        sign = -1.0 if side == "left" else 1.0
        base = axis_angle_to_matrix(sign * (np.pi / 2) * _EZ)
        phi = amplitude * env * np.sin(2.0 * np.pi * freq_hz * t + phase) ** 2
        _set_joint(motion, model, f"{side}_shoulder", -phi, _EX, base)
    return motion


def torso_lean_motion(model, cfg, amount, direction="forward", tag="upper_body"):
    motion = _base_motion(model, cfg, tag)
    prof = amount * ramp_hold_return(cfg.frames)
    axis = {"forward": -_EX, "left": _EZ, "right": -_EZ}[direction]
    for name in ("spine1", "spine2"):
        _set_joint(motion, model, name, prof / 2.0, axis)
    return motion


def torso_twist_motion(model, cfg, amount, tag="upper_body"):
    motion = _base_motion(model, cfg, tag)
    prof = amount * ramp_hold_return(cfg.frames)
    for name in ("spine1", "spine2", "spine3"):
        _set_joint(motion, model, name, prof / 3.0, _EY)
    return motion


def _arm_pump(motion, model, cfg, amplitude=0.5, freq_hz=1.0):
    t = np.arange(cfg.frames) / cfg.frame_rate
    env = ramp_hold_return(cfg.frames, rise_frac=0.25, hold_frac=0.5)
    phi = amplitude * env * np.sin(2.0 * np.pi * freq_hz * t) ** 2
    for side in ("left", "right"):
        sign = -1.0 if side == "left" else 1.0
        base = axis_angle_to_matrix(sign * (np.pi / 2) * _EZ)
        _set_joint(motion, model, f"{side}_shoulder", -phi, _EX, base)


def push_motion(model, cfg, distance, pump=True, tag="translation"):
    """Straight push: root translates along z with constant pelvis orientation."""
    motion = _base_motion(model, cfg, tag)
    t = np.arange(cfg.frames) / max(cfg.frames - 1, 1)
    motion.root_positions[:, 2] = distance * minimum_jerk(t)
    if pump:
        _arm_pump(motion, model, cfg)
    return motion


def turn_motion(model, cfg, angle, tag="rotation"):
    """Turn in place: pelvis yaw follows a minimum-jerk ramp."""
    motion = _base_motion(model, cfg, tag)
    t = np.arange(cfg.frames) / max(cfg.frames - 1, 1)
    psi = angle * minimum_jerk(t)
    _set_joint(motion, model, "pelvis", psi, _EY)
    return motion


def arc_motion(model, cfg, radius, angle, pump=True, tag="combined"):
    """Push along a circular arc while yawing: translation + rotation."""
    motion = _base_motion(model, cfg, tag)
    t = np.arange(cfg.frames) / max(cfg.frames - 1, 1)
    psi = angle * minimum_jerk(t)
    _set_joint(motion, model, "pelvis", psi, _EY)
    motion.root_positions[:, 0] = radius * (1.0 - np.cos(psi))
    motion.root_positions[:, 2] = radius * np.sin(psi)
    if pump:
        _arm_pump(motion, model, cfg, amplitude=0.35)
    return motion


def generate_synthetic_corpus(model, cfg, seed):
    """Deterministic corpus: `sequences_per_category` variants per category."""
    rng = np.random.default_rng(seed)
    elevations = [np.pi / 2, 3 * np.pi / 4, np.pi * 0.95]
    side_choices = [("left",), ("right",), ("left", "right")]
    lean_dirs = ["forward", "left", "right"]

    corpus = []
    for cat in cfg.categories:
        for k in range(cfg.sequences_per_category):
            jitter = 1.0 + rng.uniform(-0.1, 0.1)
            if cat == "arm":
                if k % 2 == 0:
                    motion = arm_raise_motion(
                        model,
                        cfg,
                        elevations[k // 2 % len(elevations)] * jitter,
                        side_choices[k % len(side_choices)],
                    )
                else:
                    motion = arm_swing_motion(model, cfg, 0.8 * jitter, 0.75)
            elif cat == "upper_body":
                if k % 2 == 0:
                    motion = torso_lean_motion(
                        model, cfg, 0.5 * jitter, lean_dirs[k // 2 % len(lean_dirs)]
                    )
                else:
                    motion = torso_twist_motion(model, cfg, 0.7 * jitter)
            elif cat == "translation":
                motion = push_motion(model, cfg, (0.8 if k % 2 == 0 else -0.6) * jitter)
            elif cat == "rotation":
                motion = turn_motion(model, cfg, (1.0 if k % 2 == 0 else -1.3) * jitter)
            elif cat == "combined":
                motion = arc_motion(
                    model, cfg, 0.6 * jitter, (0.9 if k % 2 == 0 else -0.9)
                )
            else:
                raise ValueError(f"unknown motion category: {cat}")
            corpus.append(motion)
    return corpus
