import numpy as np
import pytest

from chairpose import synthesis as syn
from chairpose import skeleton as sk
from chairpose.corpus import CorpusConfig, generate_synthetic_corpus
from chairpose.errors import SequenceTooShort
from chairpose.imu import SENSORS
from chairpose.rotations import random_rotation, axis_angle_to_matrix


def const_pose_motion(model, frames=60, frame_rate=60.0, root_fn=None):
    rot = np.tile(np.eye(3), (frames, model.num_joints, 1, 1))
    pos = np.zeros((frames, 3))
    if root_fn is not None:
        t = np.arange(frames) / frame_rate
        pos = np.stack([root_fn(ti) for ti in t])
    return syn.MotionSequence(frame_rate, rot, pos)


def test_constant_velocity_gives_zero_acceleration():
    model = sk.default_model()
    motion = const_pose_motion(model, root_fn=lambda t: np.array([0.3 * t, 0.1 * t, -0.2 * t]))
    seq = syn.synthesize_imu(model, motion, n=4)
    assert np.abs(seq.acc).max() < 1e-9


def test_quadratic_trajectory_recovers_exact_acceleration():
    # x(t) = 0.5 g t^2 -> central second difference is exact for any n
    model = sk.default_model()
    g = np.array([0.0, 0.0, -9.81])
    for n in (1, 2, 4, 7):
        motion = const_pose_motion(model, frames=40, root_fn=lambda t: 0.5 * g * t * t)
        seq = syn.synthesize_imu(model, motion, n=n)
        assert np.abs(seq.acc - g).max() < 1e-9


def test_sinusoid_matches_discrete_second_difference_oracle():
    # closed-form discrete oracle: with x(t) = sin(2 pi f t), the smoothed
    # second difference equals  -(2 sin(pi f n dt))^2 / (n dt)^2 * sin(2 pi f t)
    model = sk.default_model()
    frame_rate, f, n = 60.0, 2.3, 4
    frames = 120
    t = np.arange(frames) / frame_rate

    rot = np.tile(np.eye(3), (frames, model.num_joints, 1, 1))
    pos = np.zeros((frames, 3))
    pos[:, 1] = np.sin(2 * np.pi * f * t)
    motion = syn.MotionSequence(frame_rate, rot, pos)
    seq = syn.synthesize_imu(model, motion, n=n)

    dt = 1.0 / frame_rate
    factor = -((2.0 * np.sin(np.pi * f * n * dt)) ** 2) / (n * dt) ** 2
    expected = factor * np.sin(2 * np.pi * f * t[n : frames - n])
    assert np.abs(seq.acc[:, :, 1] - expected[:, None]).max() < 1e-9
    # and it is NOT the analytic second derivative
    analytic = -((2 * np.pi * f) ** 2)
    assert abs(factor - analytic) > 1.0


def test_output_trimming_and_too_short():
    model = sk.default_model()
    motion = const_pose_motion(model, frames=30)
    for n in (1, 3, 4):
        assert len(syn.synthesize_imu(model, motion, n=n)) == 30 - 2 * n
    with pytest.raises(SequenceTooShort):
        syn.synthesize_imu(model, const_pose_motion(model, frames=8), n=4)


def test_acceleration_is_linear_in_trajectory():
    model = sk.default_model()
    rng = np.random.default_rng(0)
    wiggle1 = rng.normal(size=(50, 3)) * 0.01
    wiggle2 = rng.normal(size=(50, 3)) * 0.01

    def make(w):
        m = const_pose_motion(model, frames=50)
        m.root_positions[:] = w
        return syn.synthesize_imu(model, m, n=4).acc

    lhs = make(2.0 * wiggle1 + 3.0 * wiggle2)
    rhs = 2.0 * make(wiggle1) + 3.0 * make(wiggle2)
    assert np.abs(lhs - rhs).max() < 1e-9


def test_orientation_is_attachment_joint_global_rotation():
    model = sk.default_model()
    frames = 20
    rot = np.tile(np.eye(3), (frames, model.num_joints, 1, 1))
    j = model.index("left_elbow")
    spin = axis_angle_to_matrix(
        np.outer(np.linspace(0, 1.0, frames), [0.0, 0.0, 1.0])
    )
    rot[:, j] = spin
    motion = syn.MotionSequence(60.0, rot, np.zeros((frames, 3)))
    seq = syn.synthesize_imu(model, motion, n=4)
    s = SENSORS.index("left_forearm")
    assert np.abs(seq.rot[:, s] - spin[4 : frames - 4]).max() < 1e-9


def test_normalize_frame_identity_pelvis():
    rng = np.random.default_rng(1)
    acc = rng.normal(size=(4, 3))
    acc[0] = 0.0
    rot = np.tile(np.eye(3), (4, 1, 1))
    rot[1:] = random_rotation(rng, 3)
    out = syn.normalize_arrays(acc, rot)
    assert out.shape == (48,)
    assert np.allclose(out[0:3], 0.0)              # pelvis accel
    assert np.allclose(out[3:12], acc[1:].ravel())  # leaf accels pass through
    assert np.allclose(out[12:21], np.eye(3).ravel())
    assert np.allclose(out[21:48], rot[1:].reshape(-1))


def test_normalize_frame_hand_computed_case():
    # pelvis rotated 90 deg about z, a_pelvis = (1,0,0), a_head = (1,1,0)
    Rz = axis_angle_to_matrix([0.0, 0.0, np.pi / 2])
    acc = np.zeros((4, 3))
    acc[0] = [1.0, 0.0, 0.0]
    acc[3] = [1.0, 1.0, 0.0]
    rot = np.tile(np.eye(3), (4, 1, 1))
    rot[0] = Rz
    rot[3] = Rz
    out = syn.normalize_arrays(acc, rot)
    # a~_head = Rz^-1 (0,1,0) = (1,0,0); R~_head = identity
    assert np.allclose(out[9:12], [1.0, 0.0, 0.0], atol=1e-12)
    assert np.allclose(out[39:48], np.eye(3).ravel(), atol=1e-12)
    # pelvis outputs: a~ = Rz^-1 (1,0,0) = (0,-1,0); R~ = Rz itself
    assert np.allclose(out[0:3], [0.0, -1.0, 0.0], atol=1e-12)
    assert np.allclose(out[12:21], Rz.ravel(), atol=1e-12)


def test_normalization_equivariance_under_global_rotation():
    # rotating every measurement by a common R leaves the leaf outputs and
    # the pelvis acceleration unchanged; R~_pelvis becomes R @ R_pelvis
    rng = np.random.default_rng(5)
    for _ in range(200):
        acc = rng.normal(size=(4, 3))
        rot = random_rotation(rng, 4)
        Q = random_rotation(rng)
        base = syn.normalize_arrays(acc, rot)
        moved = syn.normalize_arrays(
            acc @ Q.T, np.einsum("ij,sjk->sik", Q, rot)
        )
        assert np.abs(moved[0:12] - base[0:12]).max() < 1e-9
        assert np.abs(moved[21:48] - base[21:48]).max() < 1e-9
        assert np.abs(moved[12:21].reshape(3, 3) - Q @ rot[0]).max() < 1e-9


def test_normalized_sequence_shape():
    model = sk.default_model()
    corpus = generate_synthetic_corpus(model, CorpusConfig(1, 60), seed=0)
    seq = syn.synthesize_imu(model, corpus[0])
    out = syn.normalize_sequence(seq)
    assert out.shape == (len(seq), 48)


def test_corpus_determinism_and_categories():
    model = sk.default_model()
    cfg = CorpusConfig(sequences_per_category=2, frames=90)
    c1 = generate_synthetic_corpus(model, cfg, seed=12)
    c2 = generate_synthetic_corpus(model, cfg, seed=12)
    assert len(c1) == len(cfg.categories) * 2
    for m1, m2 in zip(c1, c2):
        assert (m1.rotations == m2.rotations).all()
        assert (m1.root_positions == m2.root_positions).all()
        assert m1.subject_tag == m2.subject_tag
    c3 = generate_synthetic_corpus(model, cfg, seed=13)
    assert any((a.rotations != b.rotations).any() for a, b in zip(c1, c3))


def test_translation_sequences_have_constant_pelvis_and_nonzero_accel():
    model = sk.default_model()
    corpus = generate_synthetic_corpus(model, CorpusConfig(2, 120), seed=3)
    translations = [m for m in corpus if m.subject_tag == "translation"]
    assert translations
    for m in translations:
        assert np.abs(m.rotations[:, 0] - m.rotations[0, 0]).max() == 0.0
        seq = syn.synthesize_imu(model, m)
        assert np.abs(seq.acc[:, 0]).max() > 0.01


def test_full_corpus_normalizes_to_finite_bounded_values():
    model = sk.default_model()
    corpus = generate_synthetic_corpus(model, CorpusConfig(2, 120), seed=4)
    for motion in corpus:
        out = syn.normalize_sequence(syn.synthesize_imu(model, motion))
        assert np.isfinite(out).all()
        assert np.abs(out[:, :12]).max() < 200.0


def test_imu_noise_toggle_deterministic():
    model = sk.default_model()
    motion = generate_synthetic_corpus(model, CorpusConfig(1, 60), seed=0)[0]
    seq = syn.synthesize_imu(model, motion)
    n1 = syn.add_imu_noise(seq, accel_std=0.1, orientation_std_deg=1.0, seed=9)
    n2 = syn.add_imu_noise(seq, accel_std=0.1, orientation_std_deg=1.0, seed=9)
    assert (n1.acc == n2.acc).all() and (n1.rot == n2.rot).all()
    assert (n1.acc != seq.acc).any()
