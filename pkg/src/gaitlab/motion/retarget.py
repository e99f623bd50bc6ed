"""Retarget source keypoint tracks to a robot morphology: uniform size scaling,
per-frame two-link inverse kinematics, symmetry enforcement, and limit clipping."""

from dataclasses import dataclass

import numpy as np

from .clips import MotionClip, KeypointTrack
from .ik import ik_two_link, UnreachableTarget


class RetargetError(ValueError):
    pass


@dataclass
class RetargetReport:
    scale: float
    clipped_samples: int  # joint-limit violations clipped across all frames/joints
    mirror_error: float  # best circular-shift mismatch between left and right joints


def mirror_error(left, right):
    """Smallest max-deviation between left and roll(right, k) over all shifts k."""
    n = len(left)
    best = np.inf
    for k in range(n):
        err = np.max(np.abs(left - np.roll(right, k, axis=0)))
        if err < best:
            best = err
    return float(best)


def retarget(track, morph, symmetry_tol=1e-3, clip_limits=True):
    """KeypointTrack -> (MotionClip, RetargetReport).

    Keypoints are scaled by robot_leg_length / source_leg_length about the
    origin, then each leg's joint angles come from two-link IK.  Raises on
    unreachable targets (naming the frame) and on broken left/right mirror
    symmetry; joint-limit violations are clipped and counted.
    """
    if morph.leg_length <= 0:
        raise RetargetError("robot leg length must be positive")
    scale = morph.leg_length / track.source_leg_length
    frames = track.frames * scale
    n = len(frames)

    dof = np.zeros((n, 4))
    heights = np.zeros(n)
    for i in range(n):
        for j, side in enumerate(("l", "r")):
            base = {"l": 0, "r": 6}[side]
            hip = frames[i, base : base + 2]
            ankle = frames[i, base + 4 : base + 6]
            try:
                hip_angle, knee_angle = ik_two_link(
                    hip, ankle, morph.thigh_length, morph.shank_length, morph.knee_sign
                )
            except UnreachableTarget as e:
                raise RetargetError(f"frame {i}, leg {side}: {e}") from e
            dof[i, 2 * j] = hip_angle
            dof[i, 2 * j + 1] = knee_angle
        heights[i] = 0.5 * (frames[i, 1] + frames[i, 7])

    err = max(mirror_error(dof[:, 0], dof[:, 2]), mirror_error(dof[:, 1], dof[:, 3]))
    if err > symmetry_tol:
        raise RetargetError(f"left/right mirror error {err:.2e} exceeds {symmetry_tol:.0e}")

    clipped = 0
    limits = np.asarray(morph.joint_limits)
    if clip_limits:
        before = dof.copy()
        dof = np.clip(dof, limits[:, 0], limits[:, 1])
        clipped = int(np.sum(before != dof))

    # hip horizontal velocity, finite-differenced (forward, last frame repeated)
    hip_x = 0.5 * (frames[:, 0] + frames[:, 6])
    vx = np.gradient(hip_x, track.dt)
    vz = np.gradient(heights, track.dt)

    clip_frames = np.column_stack([dof, heights, vx, vz])
    # uniform scaling scales the travel speed with the geometry
    clip = MotionClip(track.dt, clip_frames, track.label, track.nominal_speed * scale)
    return clip, RetargetReport(scale, clipped, err)
