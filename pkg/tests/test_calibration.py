import numpy as np

from chairpose import calibration as cal
from chairpose import skeleton as sk
from chairpose import synthesis as syn
from chairpose.corpus import CorpusConfig, generate_synthetic_corpus
from chairpose.imu import SENSORS, ImuFrame, ImuSequence
from chairpose.rotations import axis_angle_to_matrix, random_rotation


def tpose(model):
    return sk.identity_pose(model)


def raw_frame_from_bones(model, pose, heading=None, mounts=None, acc=None):
    """Simulate raw sensor readings: R_raw = heading^-1 @ R_bone @ mount."""
    bones = cal.bone_rotations(model, pose)
    heading = np.eye(3) if heading is None else heading
    rot = np.empty((4, 3, 3))
    accel = np.zeros((4, 3)) if acc is None else acc.copy()
    for s, name in enumerate(SENSORS):
        mount = np.eye(3) if mounts is None else mounts.get(name, np.eye(3))
        rot[s] = heading.T @ bones[name] @ mount
        accel[s] = heading.T @ accel[s]
    return ImuFrame(accel, rot)


def test_aligned_sensors_give_identity_calibration():
    model = sk.default_model()
    frame = raw_frame_from_bones(model, tpose(model))
    result = cal.compute_calibration(frame, tpose(model), model)
    for name in SENSORS:
        assert np.abs(result.offsets[name] - np.eye(3)).max() < 1e-12
        assert np.abs(result.headings[name] - np.eye(3)).max() < 1e-12


def test_known_mounting_rotation_is_recovered():
    # sensor mounted rotated 90 deg about its bone's x-axis
    model = sk.default_model()
    mount = axis_angle_to_matrix([np.pi / 2, 0.0, 0.0])
    frame = raw_frame_from_bones(model, tpose(model), mounts={"left_forearm": mount})
    result = cal.compute_calibration(frame, tpose(model), model)
    # applying the offset must undo the mounting: R_offset = mount^-1... the
    # convention is R_bone = R_heading @ R_raw @ R_offset
    applied = cal.apply_calibration(result, frame)
    bones = cal.bone_rotations(model, tpose(model))
    for s, name in enumerate(SENSORS):
        assert np.abs(applied.rot[s] - bones[name]).max() < 1e-10
    assert np.abs(result.offsets["left_forearm"] - mount.T).max() < 1e-10


def test_calibration_roundtrip_on_calibration_frame():
    model = sk.default_model()
    rng = np.random.default_rng(0)
    mounts = {name: random_rotation(rng) for name in SENSORS if name != "pelvis_or_chair"}
    heading = random_rotation(rng)
    frame = raw_frame_from_bones(model, tpose(model), heading, mounts)
    result = cal.compute_calibration(frame, tpose(model), model)
    applied = cal.apply_calibration(result, frame)
    bones = cal.bone_rotations(model, tpose(model))
    for s, name in enumerate(SENSORS):
        assert np.abs(applied.rot[s] - bones[name]).max() < 1e-6


def test_identity_calibration_leaves_frame_unchanged():
    model = sk.default_model()
    rng = np.random.default_rng(1)
    ident = cal.CalibrationResult(
        {s: np.eye(3) for s in SENSORS}, {s: np.eye(3) for s in SENSORS}
    )
    frame = ImuFrame(rng.normal(size=(4, 3)), random_rotation(rng, 4))
    out = cal.apply_calibration(ident, frame)
    assert np.abs(out.rot - frame.rot).max() < 1e-15
    assert np.abs(out.acc - frame.acc).max() < 1e-15


def test_heading_only_calibration_rotates_everything():
    rng = np.random.default_rng(2)
    Q = random_rotation(rng)
    calres = cal.CalibrationResult(
        {s: np.eye(3) for s in SENSORS}, {s: Q for s in SENSORS}
    )
    frame = ImuFrame(rng.normal(size=(4, 3)), random_rotation(rng, 4))
    out = cal.apply_calibration(calres, frame)
    assert np.abs(out.rot - Q @ frame.rot).max() < 1e-12
    assert np.abs(out.acc - frame.acc @ Q.T).max() < 1e-12


def test_calibrated_mounted_stream_matches_virtual_imu():
    # end-to-end oracle: simulate mounted sensors over a real motion, then
    # calibrate; the result must match synthesize_imu's global measurements
    model = sk.default_model()
    rng = np.random.default_rng(3)
    mounts = {
        "left_forearm": random_rotation(rng),
        "right_forearm": random_rotation(rng),
        "head": random_rotation(rng),
    }
    heading = random_rotation(rng)

    motion = generate_synthetic_corpus(model, CorpusConfig(1, 120), seed=5)[0]
    truth = syn.synthesize_imu(model, motion)

    raw_rot = np.empty_like(truth.rot)
    raw_acc = np.empty_like(truth.acc)
    for s, name in enumerate(SENSORS):
        mount = mounts.get(name, np.eye(3))
        raw_rot[:, s] = heading.T @ truth.rot[:, s] @ mount
        raw_acc[:, s] = truth.acc[:, s] @ heading  # = heading.T @ a
    raw = ImuSequence(truth.frame_rate, raw_acc, raw_rot, truth.timestamps.copy())

    # calibration frame: the same mounting observed in a T-pose
    cal_frame = raw_frame_from_bones(model, tpose(model), heading, mounts)
    result = cal.compute_calibration(cal_frame, tpose(model), model)
    restored = cal.apply_calibration_sequence(result, raw)
    assert np.abs(restored.rot - truth.rot).max() < 1e-6
    assert np.abs(restored.acc - truth.acc).max() < 1e-6


def test_heading_composition():
    # calibrating against R1 then re-heading by R2 equals calibrating with R2 @ R1
    model = sk.default_model()
    rng = np.random.default_rng(4)
    R1, R2 = random_rotation(rng), random_rotation(rng)
    frame = raw_frame_from_bones(model, tpose(model), heading=R1)
    base = cal.compute_calibration(frame, tpose(model), model)

    # ground-truth bone orientation seen if the heading were R2 @ R1
    bones = cal.bone_rotations(model, tpose(model))
    target = R2 @ bones[cal.REFERENCE_SENSOR]
    re = cal.recalibrate_heading(base, frame, target)
    for name in SENSORS:
        assert np.abs(re.headings[name] - R2 @ base.headings[name]).max() < 1e-9
    applied = cal.apply_calibration(re, frame)
    ref = SENSORS.index(cal.REFERENCE_SENSOR)
    assert np.abs(applied.rot[ref] - target).max() < 1e-9


def test_calibration_text_roundtrip():
    model = sk.default_model()
    rng = np.random.default_rng(6)
    mounts = {name: random_rotation(rng) for name in SENSORS}
    frame = raw_frame_from_bones(model, tpose(model), random_rotation(rng), mounts)
    result = cal.compute_calibration(frame, tpose(model), model)
    text = cal.calibration_to_text(result)
    back = cal.calibration_from_text(text)
    for name in SENSORS:
        assert (back.offsets[name] == result.offsets[name]).all()
        assert (back.headings[name] == result.headings[name]).all()
    assert cal.calibration_to_text(back) == text
