"""Synthetic gait keypoint generator (stand-in for MoCap capture).

Produces periodic hip/knee/ankle tracks on a human-scale source skeleton.
Walk gaits keep a duty factor above 0.5 (double support), run gaits below 0.5
(flight phase).  The stride period is snapped to a multiple of 2*dt so the two
legs are exact half-period mirrors frame-by-frame, and the duration is rounded
up to whole strides so circular symmetry checks are exact.
"""

import numpy as np

from .clips import KeypointTrack
from .ik import UnreachableTarget

SOURCE_THIGH = 0.45
SOURCE_SHANK = 0.45
SOURCE_LEG_LENGTH = SOURCE_THIGH + SOURCE_SHANK

GAIT_ENVELOPES = {"walk": (-1.0, 1.0), "run": (0.5, 2.0)}

_WALK_PERIOD = 0.8
_RUN_PERIOD = 0.48
_WALK_DUTY = 0.6
_RUN_DUTY = 0.4


def _swing_profile(u):
    """Smooth 0..1 horizontal progress for swing phase (C1 at both ends)."""
    return u - np.sin(2.0 * np.pi * u) / (2.0 * np.pi)


def generate_gait(label, speed, duration, dt=0.02):
    """Periodic keypoint track at mean horizontal hip speed `speed`."""
    if label not in GAIT_ENVELOPES:
        raise ValueError(f"unknown gait {label!r}; choose from {sorted(GAIT_ENVELOPES)}")
    lo, hi = GAIT_ENVELOPES[label]
    if not (lo <= speed <= hi) and not (label == "run" and -hi <= speed <= -lo):
        raise ValueError(f"{label} speed {speed} outside envelope [{lo}, {hi}]")
    if dt <= 0:
        raise ValueError("dt must be positive")

    period = _WALK_PERIOD if label == "walk" else _RUN_PERIOD
    duty = _WALK_DUTY if label == "walk" else _RUN_DUTY
    # snap so half a stride is an integer number of frames (exact leg mirroring)
    half_frames = max(1, round(period / (2.0 * dt)))
    period = 2.0 * half_frames * dt
    if duration < period:
        raise ValueError(f"duration {duration} shorter than one gait cycle ({period:.3f} s)")
    n_strides = int(np.ceil(duration / period - 1e-9))
    n_frames = n_strides * 2 * half_frames

    stride = speed * period  # distance per stride
    hip_height = (0.92 if label == "walk" else 0.88) * SOURCE_LEG_LENGTH
    bob = 0.015 * SOURCE_LEG_LENGTH
    lift = (0.10 if label == "walk" else 0.16) * SOURCE_LEG_LENGTH
    # hip-frame amplitude that pins the stance foot to the ground exactly;
    # a floor keeps zero-speed gaits stepping in place (feet shuffle below ~0.1 m/s)
    amp = stride * duty / 2.0
    if abs(amp) < 0.05 * SOURCE_LEG_LENGTH:
        amp = 0.05 * SOURCE_LEG_LENGTH * (np.sign(speed) if speed != 0 else 1.0)

    t = np.arange(n_frames) * dt
    hip_x = speed * t
    hip_z = hip_height - bob * np.cos(4.0 * np.pi * t / period)

    frames = np.zeros((n_frames, 12))
    for leg, offset in (("l", 0.0), ("r", 0.5)):
        phase = np.mod(t / period + offset, 1.0)
        in_stance = phase < duty
        foot_x = np.zeros(n_frames)
        foot_z = np.zeros(n_frames)
        # stance: hip-frame position sweeps +amp -> -amp at rate -stride/period
        u_st = phase / duty
        foot_x[in_stance] = amp * (1.0 - 2.0 * u_st[in_stance])
        # swing: foot returns -amp -> +amp with a vertical lift bump
        u_sw = (phase - duty) / (1.0 - duty)
        foot_x[~in_stance] = amp * (2.0 * _swing_profile(u_sw[~in_stance]) - 1.0)
        foot_z[~in_stance] = lift * np.sin(np.pi * u_sw[~in_stance])

        ankle = np.stack([hip_x + foot_x, foot_z], axis=1)
        hip = np.stack([hip_x, hip_z], axis=1)
        knee = _knee_point(hip, ankle)
        base = {"l": 0, "r": 6}[leg]
        frames[:, base + 0 : base + 2] = hip
        frames[:, base + 2 : base + 4] = knee
        frames[:, base + 4 : base + 6] = ankle

    return KeypointTrack(dt, frames, SOURCE_LEG_LENGTH, label, speed)


def _knee_point(hip, ankle):
    """Knee keypoint from hip and ankle via circle intersection (forward-pointing)."""
    d_vec = ankle - hip
    d = np.linalg.norm(d_vec, axis=1)
    if np.any(d > SOURCE_THIGH + SOURCE_SHANK + 1e-12) or np.any(d < abs(SOURCE_THIGH - SOURCE_SHANK)):
        raise UnreachableTarget("generated ankle target outside the source leg annulus")
    d = np.maximum(d, 1e-12)
    a = (SOURCE_THIGH**2 - SOURCE_SHANK**2 + d * d) / (2.0 * d)
    h = np.sqrt(np.maximum(SOURCE_THIGH**2 - a * a, 0.0))
    mid = hip + (a / d)[:, None] * d_vec
    # perpendicular pointing forward (+x side) for a human-like knee
    perp = np.stack([-d_vec[:, 1], d_vec[:, 0]], axis=1) / d[:, None]
    flip = np.where(perp[:, 0] < 0.0, -1.0, 1.0)
    return mid + (h * flip)[:, None] * perp


def stance_flags(track, ground_tol=1e-9):
    """(T, 2) booleans: foot on ground (ankle z ~ 0) per leg."""
    on = []
    for side in ("l", "r"):
        z = track.keypoint(f"ankle_{side}")[:, 1]
        on.append(z <= ground_tol)
    return np.stack(on, axis=1)
