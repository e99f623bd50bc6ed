"""Planar two-link leg kinematics.

Angle convention: absolute angles measured from straight down, positive swings
the segment forward (+x).  thigh = hip angle, shank = thigh - knee flexion, so
knee flexion is >= 0 when the knee points forward of the hip-foot line
(human-like).  knee_sign=-1 selects the mirrored solution.
"""

import numpy as np


class UnreachableTarget(ValueError):
    pass


def fk_two_link(hip_pos, hip_angle, knee_angle, l1, l2, knee_sign=1.0):
    """Foot position from joint angles."""
    t = hip_angle
    s = hip_angle - knee_sign * knee_angle
    x = hip_pos[0] + l1 * np.sin(t) + l2 * np.sin(s)
    z = hip_pos[1] - l1 * np.cos(t) - l2 * np.cos(s)
    return np.array([x, z])


def ik_two_link(hip_pos, foot_target, l1, l2, knee_sign=1.0):
    """Joint angles reaching foot_target; raises UnreachableTarget outside the annulus."""
    dx = foot_target[0] - hip_pos[0]
    dz = foot_target[1] - hip_pos[1]
    d = np.hypot(dx, dz)
    if d > l1 + l2 or d < abs(l1 - l2):
        raise UnreachableTarget(
            f"target at distance {d:.6f} outside reachable [{abs(l1 - l2):.6f}, {l1 + l2:.6f}]"
        )
    # interior knee angle via law of cosines; flexion = pi - interior
    cos_inner = np.clip((l1 * l1 + l2 * l2 - d * d) / (2.0 * l1 * l2), -1.0, 1.0)
    inner = np.arccos(cos_inner)
    knee = np.pi - inner
    # angle of the hip->target line from straight down, then offset by the
    # hip corner of the triangle toward the chosen knee side
    alpha = np.arctan2(dx, -dz)
    cos_beta = np.clip((l1 * l1 + d * d - l2 * l2) / (2.0 * l1 * max(d, 1e-12)), -1.0, 1.0)
    beta = np.arccos(cos_beta)
    hip = alpha + knee_sign * beta
    return hip, knee  # flexion is non-negative; knee_sign picks the branch in fk
