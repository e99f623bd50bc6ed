"""Planar five-link biped morphology: torso plus two thigh+shank legs with point feet."""

from dataclasses import dataclass, field

import numpy as np

JOINT_NAMES = ("hip_l", "knee_l", "hip_r", "knee_r")


class MorphologyError(ValueError):
    pass


@dataclass
class RobotMorphology:
    torso_mass: float = 6.0
    torso_length: float = 0.24
    thigh_length: float = 0.25
    shank_length: float = 0.25
    thigh_mass: float = 1.2
    shank_mass: float = 0.8
    num_dof: int = 4
    # per-joint PD gains, torque limits, limits (lower, upper), nominal pose
    pd_kp: np.ndarray = None
    pd_kd: np.ndarray = None
    torque_limit: np.ndarray = None
    joint_limits: np.ndarray = None
    nominal_pose: np.ndarray = None
    knee_sign: float = 1.0

    def __post_init__(self):
        n = self.num_dof
        if n % 2 != 0:
            raise MorphologyError("num_dof must be even (hip+knee per leg)")
        self._check_positive()
        if self.pd_kp is None:
            self.pd_kp = np.full(n, 40.0)
        if self.pd_kd is None:
            self.pd_kd = np.full(n, 1.0)
        if self.torque_limit is None:
            self.torque_limit = np.full(n, 30.0)
        if self.joint_limits is None:
            per_leg = [(-1.2, 1.2), (0.0, 2.4)]
            self.joint_limits = np.array(per_leg * (n // 2))
        if self.nominal_pose is None:
            self.nominal_pose = self._stance_pose() if n == 4 else np.zeros(n)
        self.pd_kp = np.asarray(self.pd_kp, dtype=np.float64)
        self.pd_kd = np.asarray(self.pd_kd, dtype=np.float64)
        self.torque_limit = np.asarray(self.torque_limit, dtype=np.float64)
        self.joint_limits = np.asarray(self.joint_limits, dtype=np.float64)
        self.nominal_pose = np.asarray(self.nominal_pose, dtype=np.float64)
        self.validate()

    def _check_positive(self):
        for name, v in (
            ("torso_mass", self.torso_mass),
            ("torso_length", self.torso_length),
            ("thigh_length", self.thigh_length),
            ("shank_length", self.shank_length),
            ("thigh_mass", self.thigh_mass),
            ("shank_mass", self.shank_mass),
        ):
            if not (v > 0):
                raise MorphologyError(f"{name} must be positive, got {v}")

    def validate(self):
        self._check_positive()
        if self.joint_limits.shape != (self.num_dof, 2):
            raise MorphologyError("joint_limits must be (num_dof, 2)")
        if np.any(self.joint_limits[:, 0] >= self.joint_limits[:, 1]):
            bad = int(np.argmax(self.joint_limits[:, 0] >= self.joint_limits[:, 1]))
            raise MorphologyError(f"joint_limits lower >= upper for joint {JOINT_NAMES[bad % 4]}")
        for name, arr in (("pd_kp", self.pd_kp), ("pd_kd", self.pd_kd), ("torque_limit", self.torque_limit)):
            if arr.shape != (self.num_dof,):
                raise MorphologyError(f"{name} must have length num_dof")
            if np.any(arr < 0):
                raise MorphologyError(f"{name} must be non-negative")

    def _stance_pose(self, half_split=0.06, crouch=0.96):
        """Symmetric split stance via IK: feet at +-half_split, equal height,
        so standing starts on a fore-aft support interval spanning the CoM."""
        from ..motion.ik import ik_two_link

        z = -crouch * self.leg_length
        pose = np.zeros(4)
        for leg, x in ((0, half_split), (1, -half_split)):
            hip, knee = ik_two_link((0.0, 0.0), (x, z), self.thigh_length, self.shank_length, self.knee_sign)
            pose[2 * leg] = hip
            pose[2 * leg + 1] = knee
        return pose

    @property
    def leg_length(self):
        return self.thigh_length + self.shank_length

    @property
    def total_mass(self):
        return self.torso_mass + 2.0 * (self.thigh_mass + self.shank_mass)

    @property
    def base_inertia(self):
        """Pitch inertia about the base: torso rod plus legs lumped at half leg length."""
        i_torso = self.torso_mass * self.torso_length**2 / 12.0
        leg_mass = self.thigh_mass + self.shank_mass
        return i_torso + 2.0 * leg_mass * (0.5 * self.leg_length) ** 2

    @property
    def joint_inertia(self):
        """Reflected inertia per joint (rod models, leg extended), constant by design."""
        lt, ls = self.thigh_length, self.shank_length
        i_hip = self.thigh_mass * lt**2 / 3.0 + self.shank_mass * (lt**2 + lt * ls + ls**2 / 3.0)
        i_knee = self.shank_mass * ls**2 / 3.0
        return np.tile([i_hip, i_knee], self.num_dof // 2)

    def standing_height(self, pose=None):
        """Base height with the given pose's feet touching flat ground."""
        pose = self.nominal_pose if pose is None else pose
        heights = []
        for leg in range(self.num_dof // 2):
            hip, knee = pose[2 * leg], pose[2 * leg + 1]
            t = hip
            s = hip - self.knee_sign * knee
            heights.append(self.thigh_length * np.cos(t) + self.shank_length * np.cos(s))
        return float(max(heights))
