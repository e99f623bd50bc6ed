import numpy as np
import pytest

from gaitlab.motion import (
    ik_two_link,
    fk_two_link,
    UnreachableTarget,
    generate_gait,
    stance_flags,
    retarget,
    RetargetError,
    default_clipset,
    TransitionDataset,
    transition_features,
    MotionClip,
    ClipFormatError,
    save_clip,
    load_clip,
    save_track,
    load_track,
)
from gaitlab.sim import RobotMorphology


# ----------------------------------------------------------------------
# two-link IK
# ----------------------------------------------------------------------

def test_ik_full_extension_straight_down():
    hip, knee = ik_two_link((0.0, 0.0), (0.0, -0.6), 0.3, 0.3)
    assert knee == pytest.approx(0.0, abs=1e-12)
    assert hip == pytest.approx(0.0, abs=1e-12)


def test_ik_law_of_cosines_case():
    # equal links, target at one link length: interior angle 60 deg -> flexion 2pi/3
    hip, knee = ik_two_link((0.0, 0.0), (0.0, -0.3), 0.3, 0.3)
    assert knee == pytest.approx(2.0 * np.pi / 3.0, abs=1e-12)
    foot = fk_two_link((0.0, 0.0), hip, knee, 0.3, 0.3)
    assert np.linalg.norm(foot - np.array([0.0, -0.3])) < 1e-9


def test_ik_roundtrip_random_targets():
    rng = np.random.default_rng(0)
    l1, l2 = 0.25, 0.25
    for _ in range(1000):
        r = rng.uniform(0.05, l1 + l2 - 1e-6)
        ang = rng.uniform(-np.pi, np.pi)
        target = np.array([r * np.sin(ang), -r * np.cos(ang)])
        hip, knee = ik_two_link((0.0, 0.0), target, l1, l2)
        foot = fk_two_link((0.0, 0.0), hip, knee, l1, l2)
        assert np.linalg.norm(foot - target) < 1e-9


def test_ik_unreachable_raises():
    with pytest.raises(UnreachableTarget):
        ik_two_link((0.0, 0.0), (0.0, -0.7), 0.3, 0.3)
    with pytest.raises(UnreachableTarget):
        ik_two_link((0.0, 0.0), (0.0, -0.05), 0.3, 0.2)


def test_ik_mirrored_branch():
    hip_f, knee_f = ik_two_link((0, 0), (0.1, -0.4), 0.25, 0.25, knee_sign=1.0)
    hip_b, knee_b = ik_two_link((0, 0), (0.1, -0.4), 0.25, 0.25, knee_sign=-1.0)
    foot_b = fk_two_link((0, 0), hip_b, knee_b, 0.25, 0.25, knee_sign=-1.0)
    assert np.linalg.norm(foot_b - np.array([0.1, -0.4])) < 1e-9
    assert hip_f != pytest.approx(hip_b)


# ----------------------------------------------------------------------
# gait generation
# ----------------------------------------------------------------------

def test_walk_in_place_zero_net_displacement():
    track = generate_gait("walk", 0.0, 4.0, 0.02)
    hip_x = track.keypoint("hip_l")[:, 0]
    assert abs(hip_x[-1] - hip_x[0]) < 1e-12
    # legs still move
    ankle = track.keypoint("ankle_l")
    assert np.ptp(ankle[:, 0]) > 0.01


def test_walk_travel_distance():
    track = generate_gait("walk", 0.4, 10.0, 0.02)
    hip_x = track.keypoint("hip_l")[:, 0]
    travel = hip_x[-1] + 0.4 * track.dt - hip_x[0]  # include the final frame step
    assert travel == pytest.approx(0.4 * len(track.frames) * track.dt, rel=1e-9)
    assert abs(travel - 4.0) / 4.0 < 0.05


def test_run_has_flight_phase():
    track = generate_gait("run", 1.2, 4.0, 0.02)
    on = stance_flags(track)
    both_airborne = ~on[:, 0] & ~on[:, 1]
    assert both_airborne.sum() > 0


def test_walk_has_double_support_and_high_duty():
    track = generate_gait("walk", 0.4, 4.0, 0.02)
    on = stance_flags(track)
    duty = on[:, 0].mean()
    assert duty > 0.5
    assert (on[:, 0] & on[:, 1]).sum() > 0


def test_run_duty_below_half():
    track = generate_gait("run", 1.2, 4.0, 0.02)
    on = stance_flags(track)
    assert on[:, 0].mean() < 0.5


def test_segment_lengths_respected():
    for label, speed in (("walk", 0.4), ("run", 1.2), ("walk", -0.4)):
        track = generate_gait(label, speed, 3.2, 0.02)
        track.check_segment_lengths(0.45, 0.45, tol=1e-6)


def test_speed_envelope_error_names_range():
    with pytest.raises(ValueError, match=r"envelope"):
        generate_gait("walk", 3.0, 4.0)
    with pytest.raises(ValueError, match=r"envelope"):
        generate_gait("run", 0.1, 4.0)


def test_duration_must_cover_a_cycle():
    with pytest.raises(ValueError, match="cycle"):
        generate_gait("walk", 0.2, 0.1)


# ----------------------------------------------------------------------
# retargeting
# ----------------------------------------------------------------------

def _source_sized_morph():
    return RobotMorphology(thigh_length=0.45, shank_length=0.45)


def test_retarget_scale_one_passthrough():
    track = generate_gait("walk", 0.3, 3.2, 0.02)
    clip, report = retarget(track, _source_sized_morph())
    assert report.scale == pytest.approx(1.0)
    # FK of the clip's angles must land back on the (unscaled) ankle keypoints
    m = _source_sized_morph()
    for i in (0, 10, 57):
        hip = track.frames[i, 0:2]
        foot = fk_two_link(hip, clip.dof_pos[i, 0], clip.dof_pos[i, 1], 0.45, 0.45)
        assert np.linalg.norm(foot - track.frames[i, 4:6]) < 1e-9


def test_retarget_halves_keypoint_distances():
    track = generate_gait("walk", 0.3, 3.2, 0.02)
    half = RobotMorphology(thigh_length=0.225, shank_length=0.225)
    clip, report = retarget(track, half)
    assert report.scale == pytest.approx(0.5)
    # reconstruct the scaled ankle from the clip and compare with half the source
    for i in (0, 33):
        hip_scaled = track.frames[i, 0:2] * 0.5
        foot = fk_two_link(hip_scaled, clip.dof_pos[i, 0], clip.dof_pos[i, 1], 0.225, 0.225)
        assert np.linalg.norm(foot - track.frames[i, 4:6] * 0.5) < 1e-9


def test_retarget_symmetry_half_period_mirror():
    track = generate_gait("walk", 0.4, 4.0, 0.02)
    clip, report = retarget(track, RobotMorphology())
    assert report.mirror_error < 1e-3
    half = round(0.8 / 2 / 0.02)  # half the walk stride period in frames
    hip_l, hip_r = clip.dof_pos[:, 0], clip.dof_pos[:, 2]
    assert np.max(np.abs(hip_l - np.roll(hip_r, half))) < 1e-3


def test_retarget_scale_invariance_of_angles():
    track = generate_gait("walk", 0.3, 3.2, 0.02)
    a, _ = retarget(track, RobotMorphology())
    b, _ = retarget(track, RobotMorphology(thigh_length=0.5, shank_length=0.5))
    np.testing.assert_allclose(a.dof_pos, b.dof_pos, atol=1e-9)


def test_retarget_unreachable_names_frame():
    track = generate_gait("walk", 0.3, 3.2, 0.02)
    bad = track.frames.copy()
    bad[7, 4:6] = bad[7, 0:2] + np.array([0.0, -2.0])  # ankle far below hip
    broken = type(track)(track.dt, bad, track.source_leg_length, track.label, track.nominal_speed)
    with pytest.raises(RetargetError, match="frame 7"):
        retarget(broken, _source_sized_morph())


def test_retarget_speed_scales_with_geometry():
    track = generate_gait("walk", 0.6, 3.2, 0.02)
    clip, report = retarget(track, RobotMorphology())
    assert clip.nominal_speed == pytest.approx(0.6 * report.scale)
    assert clip.base_lin_vel[:, 0].mean() == pytest.approx(clip.nominal_speed, rel=0.05)


def test_default_clipset_speeds():
    clips = default_clipset(RobotMorphology(), duration=3.2)
    speeds = sorted(c.nominal_speed for c in clips)
    assert speeds == [-0.4, -0.2, 0.2, 0.4, 0.8, 1.0]
    for c in clips:
        assert c.base_lin_vel[:, 0].mean() == pytest.approx(c.nominal_speed, rel=0.05)
        c.check_joint_limits(RobotMorphology().joint_limits)


# ----------------------------------------------------------------------
# transition sampling
# ----------------------------------------------------------------------

def _tiny_clip(n, label="walk", dt=0.02, speed=0.2, seed=0):
    rng = np.random.default_rng(seed)
    frames = np.column_stack(
        [
            0.2 * rng.standard_normal((n, 4)) + [0.1, 0.5, -0.1, 0.5],
            np.full(n, 0.45),
            np.full(n, speed),
            np.zeros(n),
        ]
    )
    return MotionClip(dt, frames, label, speed)


def test_two_frame_clip_every_pair_identical():
    ds = TransitionDataset([_tiny_clip(2)])
    rng = np.random.default_rng(1)
    a_t, a_t1 = ds.sample_pairs(32, rng)
    for i in range(1, 32):
        np.testing.assert_array_equal(a_t[i], a_t[0])
        np.testing.assert_array_equal(a_t1[i], a_t1[0])


def test_sampling_proportional_to_length():
    ds = TransitionDataset([_tiny_clip(100, seed=1), _tiny_clip(300, seed=2)])
    rng = np.random.default_rng(3)
    n = 100_000
    flat = rng.integers(0, ds.num_pairs, size=n)
    frac_clip2 = np.mean(flat >= 99)
    assert abs(frac_clip2 - 0.75) <= 0.01


def test_batch_zero_empty():
    ds = TransitionDataset([_tiny_clip(5)])
    a, b = ds.sample_pairs(0, np.random.default_rng(0))
    assert a.shape == (0, ds.dim) and b.shape == (0, ds.dim)


def test_empty_dataset_rejected():
    with pytest.raises(ValueError, match="empty"):
        TransitionDataset([])


def test_features_match_trainer_path_bit_exact():
    clip = _tiny_clip(10)
    ds = TransitionDataset([clip])
    q = clip.dof_pos
    dq = (q[1:] - q[:-1]) / clip.dt
    for t in (0, 4, 8):
        want = transition_features(q[t], dq[t] if t < 9 else dq[-1], clip.base_height[t], clip.base_lin_vel[t])
        np.testing.assert_array_equal(ds.features[0][t], want)


# ----------------------------------------------------------------------
# clip io
# ----------------------------------------------------------------------

def test_clip_roundtrip_lossless(tmp_path):
    clip = _tiny_clip(17, seed=5)
    path = tmp_path / "clip.csv"
    save_clip(path, clip)
    loaded = load_clip(path)
    assert loaded.dt == clip.dt
    assert loaded.label == clip.label
    assert loaded.nominal_speed == clip.nominal_speed
    np.testing.assert_array_equal(loaded.frames, clip.frames)


def test_clip_limit_violation_names_joint(tmp_path):
    clip = _tiny_clip(5, seed=6)
    clip.frames[2, 1] = 9.0  # knee_l far outside limits
    path = tmp_path / "clip.csv"
    save_clip(path, clip)
    with pytest.raises(ClipFormatError, match="knee_l"):
        load_clip(path, joint_limits=RobotMorphology().joint_limits)


def test_truncated_file_errors_with_line(tmp_path):
    clip = _tiny_clip(5, seed=7)
    path = tmp_path / "clip.csv"
    save_clip(path, clip)
    lines = path.read_text().splitlines()
    broken = "\n".join(lines[:3] + [lines[3].rsplit(",", 2)[0]])
    path.write_text(broken)
    with pytest.raises(ClipFormatError, match="line 4"):
        load_clip(path)


def test_malformed_header_errors(tmp_path):
    path = tmp_path / "clip.csv"
    path.write_text("dt=0.02,label=walk\nhip_l,knee_l\n")
    with pytest.raises(ClipFormatError, match="nominal_speed"):
        load_clip(path)


def test_track_roundtrip(tmp_path):
    track = generate_gait("walk", 0.3, 3.2, 0.02)
    path = tmp_path / "track.csv"
    save_track(path, track)
    loaded = load_track(path)
    assert loaded.source_leg_length == track.source_leg_length
    np.testing.assert_array_equal(loaded.frames, track.frames)
