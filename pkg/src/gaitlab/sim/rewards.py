"""Task reward terms and weights.

Raw-term definitions (planar; y components are identically zero):
    feet_slip        sum_feet |tangential foot velocity| * contact_indicator
    contact_forces   sum_feet max(0, ||F_foot|| - F_max)
    lin_track        exp(-4 (v_cmd - v)^2)
    ang_track        exp(-4 (yaw_cmd - yaw_rate)^2)
    root_accel       exp(-||a_root||^3), a_root the finite-difference base accel
    smoothness       ||a_t - 2 a_{t-1} + a_{t-2}||^2 over actions
"""

from dataclasses import dataclass, field

import numpy as np

TERM_NAMES = ("feet_slip", "contact_forces", "lin_track", "ang_track", "root_accel", "smoothness")

DEFAULT_WEIGHTS = (-0.05, -0.01, 2.4, 1.1, 0.2, -0.01)


@dataclass
class RewardParams:
    weights: tuple = DEFAULT_WEIGHTS
    contact_force_max: float = 147.15  # 1.5x body weight for the 10 kg default

    def __post_init__(self):
        if len(self.weights) != len(TERM_NAMES):
            raise ValueError(f"need {len(TERM_NAMES)} weights")


@dataclass
class RewardBreakdown:
    names: tuple
    raw: np.ndarray  # (n, terms)
    weights: np.ndarray  # (terms,)

    @property
    def weighted(self):
        return self.raw * self.weights

    @property
    def total(self):
        return self.weighted.sum(axis=1)

    def term(self, name):
        return self.raw[:, self.names.index(name)]

    def single(self, i=0):
        """Per-term (name, raw, weight, weighted) tuples plus total for env i."""
        rows = [
            (name, float(self.raw[i, j]), float(self.weights[j]), float(self.raw[i, j] * self.weights[j]))
            for j, name in enumerate(self.names)
        ]
        return rows, float(self.total[i])


def compute_reward_terms(
    foot_vel_x,
    foot_contact,
    foot_force,
    cmd_vx,
    base_vx,
    cmd_yaw_rate,
    yaw_rate,
    accel,
    action_t,
    action_tm1,
    action_tm2,
    params,
):
    """Vectorized raw terms; every array's leading axis is the env index."""
    foot_vel_x = np.atleast_2d(foot_vel_x)
    foot_contact = np.atleast_2d(foot_contact)
    foot_force = np.asarray(foot_force, dtype=np.float64)
    if foot_force.ndim == 2:
        foot_force = foot_force[None]
    cmd_vx = np.atleast_1d(cmd_vx)
    base_vx = np.atleast_1d(base_vx)
    cmd_yaw_rate = np.atleast_1d(cmd_yaw_rate)
    yaw_rate = np.atleast_1d(yaw_rate)
    accel = np.atleast_2d(accel)
    action_t = np.atleast_2d(action_t)
    action_tm1 = np.atleast_2d(action_tm1)
    action_tm2 = np.atleast_2d(action_tm2)

    slip = np.sum(np.abs(foot_vel_x) * foot_contact, axis=1)
    force_norm = np.linalg.norm(foot_force, axis=2)
    contact = np.sum(np.maximum(0.0, force_norm - params.contact_force_max), axis=1)
    lin = np.exp(-4.0 * (cmd_vx - base_vx) ** 2)
    ang = np.exp(-4.0 * (cmd_yaw_rate - yaw_rate) ** 2)
    root = np.exp(-np.linalg.norm(accel, axis=1) ** 3)
    smooth = np.sum((action_t - 2.0 * action_tm1 + action_tm2) ** 2, axis=1)

    raw = np.stack([slip, contact, lin, ang, root, smooth], axis=1)
    return RewardBreakdown(TERM_NAMES, raw, np.asarray(params.weights, dtype=np.float64))


def task_rewards(state_t, state_prev, cmd, action_hist, control_dt, params=None):
    """Single-state convenience wrapper over compute_reward_terms.

    action_hist: (a_t, a_{t-1}, a_{t-2}); cmd: 3-vector (vx, vy, yaw rate).
    """
    params = params or RewardParams()
    accel = (state_t.base_lin_vel - state_prev.base_lin_vel) / control_dt
    return compute_reward_terms(
        foot_vel_x=state_t.foot_vel[:, 0],
        foot_contact=state_t.foot_contact,
        foot_force=state_t.foot_contact_force,
        cmd_vx=cmd[0],
        base_vx=state_t.base_lin_vel[0],
        cmd_yaw_rate=cmd[2],
        yaw_rate=0.0,
        accel=accel,
        action_t=action_hist[0],
        action_tm1=action_hist[1],
        action_tm2=action_hist[2],
        params=params,
    )
