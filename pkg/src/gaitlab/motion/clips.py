"""Reference motion containers and their CSV on-disk format.

Clip CSV layout:
    line 1: dt=<f>,label=<s>,nominal_speed=<f>
    line 2: column names
    rest:   one row per frame
Keypoint tracks use the same layout with keypoint columns.
"""

from dataclasses import dataclass

import numpy as np

KEYPOINT_COLUMNS = (
    "hip_l_x", "hip_l_z", "knee_l_x", "knee_l_z", "ankle_l_x", "ankle_l_z",
    "hip_r_x", "hip_r_z", "knee_r_x", "knee_r_z", "ankle_r_x", "ankle_r_z",
)

CLIP_COLUMNS = ("hip_l", "knee_l", "hip_r", "knee_r", "base_height", "base_vx", "base_vz")


class ClipFormatError(ValueError):
    pass


@dataclass
class KeypointTrack:
    dt: float
    frames: np.ndarray  # (T, 12) in KEYPOINT_COLUMNS order, source-skeleton metres
    source_leg_length: float
    label: str
    nominal_speed: float

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if len(self.frames) < 2:
            raise ValueError("need at least 2 frames")
        if self.frames.shape[1] != len(KEYPOINT_COLUMNS):
            raise ValueError(f"expected {len(KEYPOINT_COLUMNS)} keypoint columns")

    def keypoint(self, name):
        i = KEYPOINT_COLUMNS.index(f"{name}_x")
        return self.frames[:, i : i + 2]

    def check_segment_lengths(self, l_thigh, l_shank, tol=1e-6):
        """Keypoint chains must respect source segment lengths."""
        for side in ("l", "r"):
            hip = self.keypoint(f"hip_{side}")
            knee = self.keypoint(f"knee_{side}")
            ankle = self.keypoint(f"ankle_{side}")
            d1 = np.linalg.norm(knee - hip, axis=1)
            d2 = np.linalg.norm(ankle - knee, axis=1)
            if np.max(np.abs(d1 - l_thigh)) > tol or np.max(np.abs(d2 - l_shank)) > tol:
                raise ValueError(f"segment lengths violated on side {side}")


@dataclass
class MotionClip:
    dt: float
    frames: np.ndarray  # (T, 7) in CLIP_COLUMNS order
    label: str
    nominal_speed: float

    def __post_init__(self):
        self.frames = np.asarray(self.frames, dtype=np.float64)
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if len(self.frames) < 2:
            raise ValueError("need at least 2 frames")
        if self.frames.shape[1] != len(CLIP_COLUMNS):
            raise ValueError(f"expected {len(CLIP_COLUMNS)} clip columns")

    @property
    def dof_pos(self):
        return self.frames[:, :4]

    @property
    def base_height(self):
        return self.frames[:, 4]

    @property
    def base_lin_vel(self):
        return self.frames[:, 5:7]

    def check_joint_limits(self, joint_limits, name="clip"):
        """joint_limits: (4, 2) lower/upper per joint.  Raises naming the joint."""
        limits = np.asarray(joint_limits)
        for j, col in enumerate(CLIP_COLUMNS[:4]):
            q = self.frames[:, j]
            if q.min() < limits[j, 0] - 1e-9 or q.max() > limits[j, 1] + 1e-9:
                raise ClipFormatError(
                    f"{name}: joint {col} outside limits "
                    f"[{limits[j, 0]}, {limits[j, 1]}] (range [{q.min():.4f}, {q.max():.4f}])"
                )


def _write_table(path, dt, label, nominal_speed, columns, frames):
    with open(path, "w") as f:
        f.write(f"dt={dt!r},label={label},nominal_speed={nominal_speed!r}\n")
        f.write(",".join(columns) + "\n")
        for row in frames:
            f.write(",".join(repr(float(v)) for v in row) + "\n")


def _read_table(path, columns):
    with open(path) as f:
        lines = f.read().splitlines()
    if not lines:
        raise ClipFormatError(f"{path}: line 1: empty file")
    header = {}
    for part in lines[0].split(","):
        if "=" not in part:
            raise ClipFormatError(f"{path}: line 1: expected key=value fields, got {part!r}")
        k, v = part.split("=", 1)
        header[k.strip()] = v.strip()
    for key in ("dt", "label", "nominal_speed"):
        if key not in header:
            raise ClipFormatError(f"{path}: line 1: missing header field {key!r}")
    if len(lines) < 2 or tuple(lines[1].split(",")) != tuple(columns):
        raise ClipFormatError(f"{path}: line 2: expected columns {','.join(columns)}")
    rows = []
    for lineno, line in enumerate(lines[2:], start=3):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != len(columns):
            raise ClipFormatError(f"{path}: line {lineno}: expected {len(columns)} values, got {len(parts)}")
        try:
            rows.append([float(p) for p in parts])
        except ValueError as e:
            raise ClipFormatError(f"{path}: line {lineno}: {e}") from e
    if len(rows) < 2:
        raise ClipFormatError(f"{path}: line {len(lines)}: fewer than 2 frames")
    try:
        dt = float(header["dt"])
        speed = float(header["nominal_speed"])
    except ValueError as e:
        raise ClipFormatError(f"{path}: line 1: {e}") from e
    return dt, header["label"], speed, np.array(rows)


def save_clip(path, clip):
    _write_table(path, clip.dt, clip.label, clip.nominal_speed, CLIP_COLUMNS, clip.frames)


def load_clip(path, joint_limits=None):
    dt, label, speed, frames = _read_table(path, CLIP_COLUMNS)
    clip = MotionClip(dt, frames, label, speed)
    if joint_limits is not None:
        clip.check_joint_limits(joint_limits, name=str(path))
    return clip


def save_track(path, track):
    _write_table(path, track.dt, track.label, track.nominal_speed, KEYPOINT_COLUMNS, track.frames)
    with open(path, "a") as f:
        f.write(f"# source_leg_length={track.source_leg_length!r}\n")


def load_track(path):
    with open(path) as f:
        lines = f.read().splitlines()
    leg_length = None
    for line in lines:
        if line.startswith("# source_leg_length="):
            leg_length = float(line.split("=", 1)[1])
    if leg_length is None:
        raise ClipFormatError(f"{path}: missing source_leg_length trailer")
    dt, label, speed, frames = _read_table(path, KEYPOINT_COLUMNS)
    return KeypointTrack(dt, frames, leg_length, label, speed)
