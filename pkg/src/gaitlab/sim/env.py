"""Vectorized planar biped environment.

Dynamics model: the robot's mass and pitch inertia are lumped at the base; each
actuated joint is a PD-driven rotor with constant reflected inertia.  Feet are
points located by leg forward kinematics; ground contact is a spring-damper
normal force with Coulomb-capped tangential friction, applied to the base at
the foot position.  Integration is semi-implicit Euler at the physics dt with
`decimation` substeps per control step.  With zero torque, zero push, and no
contact this integrator never increases the model's mechanical energy, which
is what the energy-sanity property checks.

All per-env randomness flows through one numpy Generator per environment
instance, seeded from the root seed, so trajectories are bit-reproducible.
"""

from dataclasses import dataclass, field

import numpy as np

from .morphology import RobotMorphology
from .rewards import RewardParams, compute_reward_terms, RewardBreakdown

GRAVITY = 9.81

# Table-driven observation noise levels (uniform half-width per channel group)
NOISE_COMMAND = 0.0
NOISE_ANG_VEL = 0.3
NOISE_ROT_XY = 0.09
NOISE_DOF_POS = 0.075
NOISE_DOF_VEL = 2.25
NOISE_LAST_ACTION = 0.0


@dataclass
class RandomizationConfig:
    """Per-episode domain randomization ranges (lo, hi).

    base_mass_delta defaults to +-22% of the torso mass, the full-size +-5 kg
    band scaled by the mass ratio.
    """

    base_mass_delta: tuple = None
    com_shift: tuple = (-0.02, 0.02)
    friction: tuple = (0.1, 2.0)
    kp_factor: tuple = (0.8, 1.2)
    kd_factor: tuple = (0.8, 1.2)
    push_lin: tuple = (-0.6, 0.6)
    push_ang: tuple = (-0.6, 0.6)
    motor_strength: tuple = (0.8, 1.2)
    delay_ms: tuple = (0.0, 60.0)

    def resolve(self, morph):
        if self.base_mass_delta is None:
            d = 0.22 * morph.torso_mass
            self.base_mass_delta = (-d, d)
        self.validate()
        return self

    def validate(self):
        for name in ("base_mass_delta", "com_shift", "friction", "kp_factor",
                     "kd_factor", "push_lin", "push_ang", "motor_strength", "delay_ms"):
            rng = getattr(self, name)
            if rng is None:
                continue
            lo, hi = rng
            if lo > hi:
                raise ValueError(f"randomization range {name} inverted: [{lo}, {hi}]")
        if self.friction is not None and self.friction[0] < 0:
            raise ValueError("friction lower bound must be >= 0")
        if self.delay_ms is not None and self.delay_ms[0] < 0:
            raise ValueError("delay_ms lower bound must be >= 0")


@dataclass
class RandomizationDraw:
    base_mass_delta: float
    com_shift: float
    friction: float
    kp_factor: float
    kd_factor: float
    push_lin: float
    push_ang: float
    motor_strength: float
    delay_ms: float


@dataclass
class SimConfig:
    physics_dt: float = 0.001
    decimation: int = 20
    gravity: float = GRAVITY
    contact_stiffness: float = 2.0e4  # N/m
    contact_damping: float = 200.0  # N*s/m
    tangential_damping: float = 400.0  # N*s/m, capped by mu*Fn
    episode_length_s: float = 20.0
    fall_height: float = 0.3
    fall_pitch: float = 1.0
    push_interval_s: float = 4.0
    pushes_enabled: bool = True
    cmd_vx_range: tuple = (-0.6, 1.0)
    history_length: int = 6
    reset_pose_noise: float = 0.01
    reset_pitch_noise: float = 0.01
    bump_amplitude: float = 0.0  # 1-D height-field, <= 0.03 m
    bump_wavelength: float = 1.0
    obs_noise_scale: float = 1.0  # scales every Table noise level (0 = clean)
    contact_force_max: float = None  # default 1.5x body weight, filled on bind

    @property
    def control_dt(self):
        return self.physics_dt * self.decimation

    def validate(self):
        if self.physics_dt <= 0 or self.decimation < 1:
            raise ValueError("physics_dt must be positive and decimation >= 1")
        if self.bump_amplitude < 0 or self.bump_amplitude > 0.03:
            raise ValueError("bump_amplitude must lie in [0, 0.03] m")
        if self.cmd_vx_range[0] > self.cmd_vx_range[1]:
            raise ValueError("cmd_vx_range inverted")
        if self.history_length < 1:
            raise ValueError("history_length must be >= 1")


@dataclass
class SimState:
    """Single-environment privileged state snapshot."""

    base_pos: np.ndarray  # (x, z) of the lumped CoM
    base_pitch: float
    base_lin_vel: np.ndarray  # (vx, vz)
    base_pitch_rate: float
    dof_pos: np.ndarray
    dof_vel: np.ndarray
    foot_contact: np.ndarray  # bool per foot
    foot_contact_force: np.ndarray  # (feet, 2) force vectors, z is the normal component
    foot_vel: np.ndarray  # (feet, 2) world foot velocities
    time: float


@dataclass
class ObservationFrame:
    command: np.ndarray  # (3,)
    base_ang_vel: np.ndarray  # (3,) pitch rate in slot 1
    base_rot_xy: np.ndarray  # (2,) gravity-projected, pitch in slot 1
    dof_pos: np.ndarray
    dof_vel: np.ndarray
    last_action: np.ndarray

    @property
    def vector(self):
        return np.concatenate(
            [self.command, self.base_ang_vel, self.base_rot_xy,
             self.dof_pos, self.dof_vel, self.last_action]
        )


def obs_dim(num_dof):
    return 3 + 3 + 2 + 3 * num_dof


def hidden_dim(num_dof):
    return 2 * num_dof + 7  # dof pos/vel, lin vel (3), ang vel (3), height


class PlanarBipedEnv:
    """num_envs independent planar bipeds stepped in lockstep.

    The single-env API of the spec is this class with num_envs=1 plus the
    `state(i)` / `frame(i)` views.
    """

    def __init__(self, morph=None, sim_cfg=None, rand_cfg=None, num_envs=1, seed=0, auto_reset=True):
        self.morph = morph or RobotMorphology()
        if self.morph.num_dof != 4:
            raise ValueError("the bundled planar biped supports num_dof=4")
        self.cfg = sim_cfg or SimConfig()
        self.cfg.validate()
        self.auto_reset = auto_reset
        self.rand_cfg = (rand_cfg or RandomizationConfig()).resolve(self.morph)
        self.num_envs = num_envs
        self.num_dof = self.morph.num_dof
        self.obs_dim = obs_dim(self.num_dof)
        self.hidden_dim = hidden_dim(self.num_dof)
        self.action_dim = self.num_dof
        if self.cfg.contact_force_max is None:
            self.cfg.contact_force_max = 1.5 * self.morph.total_mass * self.cfg.gravity
        self.reward_params = RewardParams(contact_force_max=self.cfg.contact_force_max)
        self._push_steps = max(1, round(self.cfg.push_interval_s / self.cfg.control_dt))
        self._timeout_steps = max(1, round(self.cfg.episode_length_s / self.cfg.control_dt))
        self._rngs = None
        self._root_seed = seed
        self.reset(seed)

    # ------------------------------------------------------------------
    # lifecycle
    # ------------------------------------------------------------------

    def reset(self, seed=None):
        """Full ensemble reset.  With a seed, reseeds every per-env generator."""
        if seed is not None or self._rngs is None:
            root = self._root_seed if seed is None else seed
            self._root_seed = root
            seq = np.random.SeedSequence(root)
            self._rngs = [np.random.Generator(np.random.PCG64(s)) for s in seq.spawn(self.num_envs)]
        n, d = self.num_envs, self.num_dof
        self.base_pos = np.zeros((n, 2))
        self.base_pitch = np.zeros(n)
        self.base_lin_vel = np.zeros((n, 2))
        self.base_pitch_rate = np.zeros(n)
        self.dof_pos = np.zeros((n, d))
        self.dof_vel = np.zeros((n, d))
        self.foot_contact = np.zeros((n, 2), dtype=bool)
        self.foot_force = np.zeros((n, 2, 2))
        self.foot_vel = np.zeros((n, 2, 2))
        self.time = np.zeros(n)
        self.episode_step = np.zeros(n, dtype=np.int64)
        self.command = np.zeros((n, 3))
        self.last_action = np.tile(self.morph.nominal_pose, (n, 1))
        self.prev_action = self.last_action.copy()
        self.prev_prev_action = self.last_action.copy()
        # action ring for the delay buffer: [a_{k-3}, a_{k-2}, a_{k-1}, a_k]
        self.action_ring = np.tile(self.morph.nominal_pose, (n, 4, 1))
        self.prev_base_lin_vel = np.zeros((n, 2))
        # per-episode randomization draws
        self.friction = np.ones(n)
        self.kp_factor = np.ones(n)
        self.kd_factor = np.ones(n)
        self.motor_strength = np.ones(n)
        self.mass_delta = np.zeros(n)
        self.com_shift = np.zeros(n)
        self.push_lin = np.zeros(n)
        self.push_ang = np.zeros(n)
        self.delay_substeps = np.zeros(n, dtype=np.int64)
        self.next_push_step = np.full(n, np.iinfo(np.int64).max, dtype=np.int64)
        self.history = np.zeros((n, self.cfg.history_length, self.obs_dim))
        self._reset_envs(np.arange(n))
        return self.state(0), self.frame(0)

    def _uniform(self, rng, lohi):
        lo, hi = lohi
        if lo == hi:
            return float(lo)
        return float(rng.uniform(lo, hi))

    def _reset_envs(self, ids):
        cfg, morph = self.cfg, self.morph
        for i in ids:
            rng = self._rngs[i]
            rc = self.rand_cfg
            self.mass_delta[i] = self._uniform(rng, rc.base_mass_delta)
            self.com_shift[i] = self._uniform(rng, rc.com_shift)
            self.friction[i] = self._uniform(rng, rc.friction)
            self.kp_factor[i] = self._uniform(rng, rc.kp_factor)
            self.kd_factor[i] = self._uniform(rng, rc.kd_factor)
            self.push_lin[i] = self._uniform(rng, rc.push_lin)
            self.push_ang[i] = self._uniform(rng, rc.push_ang)
            self.motor_strength[i] = self._uniform(rng, rc.motor_strength)
            self.delay_substeps[i] = int(round(self._uniform(rng, rc.delay_ms) / (cfg.physics_dt * 1000.0)))
            pose = morph.nominal_pose + rng.uniform(-cfg.reset_pose_noise, cfg.reset_pose_noise, self.num_dof)
            pose = np.clip(pose, morph.joint_limits[:, 0], morph.joint_limits[:, 1])
            self.dof_pos[i] = pose
            self.dof_vel[i] = 0.0
            self.base_pitch[i] = rng.uniform(-cfg.reset_pitch_noise, cfg.reset_pitch_noise)
            self.base_pitch_rate[i] = 0.0
            self.base_lin_vel[i] = 0.0
            self.prev_base_lin_vel[i] = 0.0
            self.base_pos[i] = (0.0, morph.standing_height(pose))
            self.command[i] = (self._uniform(rng, cfg.cmd_vx_range), 0.0, 0.0)
            self.time[i] = 0.0
            self.episode_step[i] = 0
            self.last_action[i] = pose
            self.prev_action[i] = pose
            self.prev_prev_action[i] = pose
            self.action_ring[i] = pose
            self.foot_contact[i] = False
            self.foot_force[i] = 0.0
            self.foot_vel[i] = 0.0
            self.next_push_step[i] = self._push_steps if cfg.pushes_enabled else np.iinfo(np.int64).max
        self._refresh_contact(ids)
        frames = self._observe(ids)
        self.history[ids] = frames[:, None, :]  # frame-repeat padding

    # ------------------------------------------------------------------
    # kinematics and contact
    # ------------------------------------------------------------------

    def ground_height(self, x):
        if self.cfg.bump_amplitude == 0.0:
            return np.zeros_like(x)
        return self.cfg.bump_amplitude * np.sin(2.0 * np.pi * x / self.cfg.bump_wavelength)

    def _foot_kinematics(self, ids=None):
        """World foot positions and velocities, (n, feet, 2) each."""
        sl = slice(None) if ids is None else ids
        morph = self.morph
        pitch = self.base_pitch[sl]
        cp, sp = np.cos(pitch), np.sin(pitch)
        # hip anchor offset in the base frame counteracts the CoM shift
        ax = -self.com_shift[sl]
        anchor = np.stack([self.base_pos[sl, 0] + cp * ax, self.base_pos[sl, 1] + sp * ax], axis=1)
        anchor_vel = np.stack(
            [
                self.base_lin_vel[sl, 0] - sp * ax * self.base_pitch_rate[sl],
                self.base_lin_vel[sl, 1] + cp * ax * self.base_pitch_rate[sl],
            ],
            axis=1,
        )
        pos = np.zeros((anchor.shape[0], 2, 2))
        vel = np.zeros_like(pos)
        for leg in range(2):
            hip = self.dof_pos[sl, 2 * leg]
            knee = self.dof_pos[sl, 2 * leg + 1]
            hip_rate = self.dof_vel[sl, 2 * leg]
            knee_rate = self.dof_vel[sl, 2 * leg + 1]
            t = pitch + hip
            s = t - morph.knee_sign * knee
            t_rate = self.base_pitch_rate[sl] + hip_rate
            s_rate = t_rate - morph.knee_sign * knee_rate
            lt, ls = morph.thigh_length, morph.shank_length
            pos[:, leg, 0] = anchor[:, 0] + lt * np.sin(t) + ls * np.sin(s)
            pos[:, leg, 1] = anchor[:, 1] - lt * np.cos(t) - ls * np.cos(s)
            vel[:, leg, 0] = anchor_vel[:, 0] + lt * np.cos(t) * t_rate + ls * np.cos(s) * s_rate
            vel[:, leg, 1] = anchor_vel[:, 1] + lt * np.sin(t) * t_rate + ls * np.sin(s) * s_rate
        return pos, vel

    def _contact_forces(self, pos, vel, ids=None):
        """Spring-damper normal force plus Coulomb-capped tangential friction."""
        sl = slice(None) if ids is None else ids
        cfg = self.cfg
        pen = self.ground_height(pos[:, :, 0]) - pos[:, :, 1]
        fn = np.where(pen > 0.0, cfg.contact_stiffness * pen - cfg.contact_damping * vel[:, :, 1], 0.0)
        fn = np.maximum(fn, 0.0)
        ft = -cfg.tangential_damping * vel[:, :, 0]
        cap = self.friction[sl][:, None] * fn
        ft = np.clip(ft, -cap, cap)
        ft = np.where(fn > 0.0, ft, 0.0)
        return np.stack([ft, fn], axis=2)

    def _refresh_contact(self, ids):
        pos, vel = self._foot_kinematics(ids)
        forces = self._contact_forces(pos, vel, ids)
        self.foot_force[ids] = forces
        self.foot_vel[ids] = vel
        self.foot_contact[ids] = forces[:, :, 1] > 0.0

    # ------------------------------------------------------------------
    # stepping
    # ------------------------------------------------------------------

    def step(self, action):
        """One control step (decimation physics substeps).

        action: (num_envs, num_dof) target joint positions in radians (a 1-D
        array is accepted for num_envs=1).  Returns (obs, reward_breakdown,
        done, info); the single-env views remain available via state()/frame().
        """
        cfg, morph = self.cfg, self.morph
        action = np.asarray(action, dtype=np.float64)
        if action.ndim == 1:
            action = action[None, :]
        if action.shape != (self.num_envs, self.num_dof):
            raise ValueError(f"action shape {action.shape} != {(self.num_envs, self.num_dof)}")
        if not np.isfinite(action).all():
            raise ValueError("non-finite action")
        action = np.clip(action, morph.joint_limits[:, 0], morph.joint_limits[:, 1])

        self.prev_prev_action = self.prev_action
        self.prev_action = self.last_action
        self.last_action = action.copy()
        self.action_ring = np.roll(self.action_ring, -1, axis=1)
        self.action_ring[:, -1] = action

        state_prev_vel = self.base_lin_vel.copy()

        dt = cfg.physics_dt
        mass = morph.total_mass + self.mass_delta
        inertia = morph.base_inertia
        joint_inertia = morph.joint_inertia
        kp = self.kp_factor[:, None] * morph.pd_kp
        kd = self.kd_factor[:, None] * morph.pd_kd
        tau_max = self.motor_strength[:, None] * morph.torque_limit
        lower, upper = morph.joint_limits[:, 0], morph.joint_limits[:, 1]
        step_idx = self.episode_step * cfg.decimation

        for j in range(cfg.decimation):
            # delay buffer: effective action submitted floor((n_sub - d)/decimation)
            offset = (step_idx + j - self.delay_substeps) // cfg.decimation - self.episode_step
            ring_idx = np.clip(offset + 3, 0, 3)
            a_eff = self.action_ring[np.arange(self.num_envs), ring_idx]

            tau = kp * (a_eff - self.dof_pos) - kd * self.dof_vel
            tau = np.clip(tau, -tau_max, tau_max)
            self.dof_vel += tau / joint_inertia * dt
            self.dof_pos += self.dof_vel * dt
            # hard joint stops: clamp and kill the violating velocity
            hit_lo = self.dof_pos < lower
            hit_hi = self.dof_pos > upper
            self.dof_pos = np.clip(self.dof_pos, lower, upper)
            self.dof_vel = np.where(hit_lo & (self.dof_vel < 0), 0.0, self.dof_vel)
            self.dof_vel = np.where(hit_hi & (self.dof_vel > 0), 0.0, self.dof_vel)

            pos, vel = self._foot_kinematics()
            forces = self._contact_forces(pos, vel)
            self.foot_force = forces
            self.foot_vel = vel
            self.foot_contact = forces[:, :, 1] > 0.0

            f_total = forces.sum(axis=1)
            f_total[:, 1] -= mass * cfg.gravity
            arm = pos - self.base_pos[:, None, :]
            torque = (arm[:, :, 0] * forces[:, :, 1] - arm[:, :, 1] * forces[:, :, 0]).sum(axis=1)

            self.base_lin_vel += f_total / mass[:, None] * dt
            self.base_pitch_rate += torque / inertia * dt
            self.base_pos += self.base_lin_vel * dt
            self.base_pitch += self.base_pitch_rate * dt

        self.time += cfg.control_dt
        self.episode_step += 1

        breakdown = compute_reward_terms(
            foot_vel_x=self.foot_vel[:, :, 0],
            foot_contact=self.foot_contact,
            foot_force=self.foot_force,
            cmd_vx=self.command[:, 0],
            base_vx=self.base_lin_vel[:, 0],
            cmd_yaw_rate=self.command[:, 2],
            yaw_rate=np.zeros(self.num_envs),
            accel=(self.base_lin_vel - state_prev_vel) / cfg.control_dt,
            action_t=self.last_action,
            action_tm1=self.prev_action,
            action_tm2=self.prev_prev_action,
            params=self.reward_params,
        )

        # scheduled velocity-impulse pushes (steps are exact; time floats drift)
        due = self.episode_step >= self.next_push_step
        if np.any(due):
            self.base_lin_vel[due, 0] += self.push_lin[due]
            self.base_pitch_rate[due] += self.push_ang[due]
            self.next_push_step[due] += self._push_steps

        height = self.base_pos[:, 1] - self.ground_height(self.base_pos[:, 0])
        fell = (height < cfg.fall_height) | (np.abs(self.base_pitch) > cfg.fall_pitch)
        timeout = self.episode_step >= self._timeout_steps
        done = fell | timeout

        obs = self._observe(np.arange(self.num_envs))
        self.history = np.roll(self.history, -1, axis=1)
        self.history[:, -1] = obs

        # pre-reset snapshots: terminal rows stay valid for bootstrapping
        info = {
            "timeout": timeout & ~fell,
            "obs": obs.copy(),
            "hidden": self.hidden_state(),
            "history": self.history.copy(),
        }
        if np.any(done) and self.auto_reset:
            ids = np.flatnonzero(done)
            self._reset_envs(ids)
            obs = self.history[:, -1].copy()
        return obs, breakdown, done, info

    def sample_observation(self, i=0):
        """Draw a fresh noisy observation of env i's current state (advances its RNG)."""
        return self._observe(np.array([i]))[0]

    def apply_push(self, push_lin, push_ang, env_ids=None):
        """Velocity impulse: base vx += push_lin, pitch rate += push_ang."""
        ids = slice(None) if env_ids is None else env_ids
        self.base_lin_vel[ids, 0] += push_lin
        self.base_pitch_rate[ids] += push_ang

    # ------------------------------------------------------------------
    # observation and state views
    # ------------------------------------------------------------------

    def _observe(self, ids):
        """Noisy partial observation frames for the given env ids, (len(ids), obs_dim)."""
        n = len(ids)
        d = self.num_dof
        frames = np.zeros((n, self.obs_dim))
        frames[:, 0:3] = self.command[ids]
        frames[:, 4] = self.base_pitch_rate[ids]
        frames[:, 7] = np.sin(self.base_pitch[ids])
        frames[:, 8 : 8 + d] = self.dof_pos[ids]
        frames[:, 8 + d : 8 + 2 * d] = self.dof_vel[ids]
        frames[:, 8 + 2 * d : 8 + 3 * d] = self.last_action[ids]
        scale = self.cfg.obs_noise_scale
        for row, i in enumerate(ids):
            rng = self._rngs[i]
            noise = scale * rng.uniform(-1.0, 1.0, size=self.obs_dim)
            frames[row, 3:6] += NOISE_ANG_VEL * noise[3:6]
            frames[row, 6:8] += NOISE_ROT_XY * noise[6:8]
            frames[row, 8 : 8 + d] += NOISE_DOF_POS * noise[8 : 8 + d]
            frames[row, 8 + d : 8 + 2 * d] += NOISE_DOF_VEL * noise[8 + d : 8 + 2 * d]
        return frames

    def project_state(self, i=0):
        """Ground-truth (noise-free) observation projection for env i."""
        d = self.num_dof
        out = np.zeros(self.obs_dim)
        out[0:3] = self.command[i]
        out[4] = self.base_pitch_rate[i]
        out[7] = np.sin(self.base_pitch[i])
        out[8 : 8 + d] = self.dof_pos[i]
        out[8 + d : 8 + 2 * d] = self.dof_vel[i]
        out[8 + 2 * d : 8 + 3 * d] = self.last_action[i]
        return out

    def hidden_state(self):
        """Privileged state vectors, (num_envs, hidden_dim)."""
        n, d = self.num_envs, self.num_dof
        out = np.zeros((n, self.hidden_dim))
        out[:, 0:d] = self.dof_pos
        out[:, d : 2 * d] = self.dof_vel
        out[:, 2 * d] = self.base_lin_vel[:, 0]
        out[:, 2 * d + 2] = self.base_lin_vel[:, 1]
        out[:, 2 * d + 4] = self.base_pitch_rate
        out[:, 2 * d + 6] = self.base_pos[:, 1]
        return out

    def true_velocity3(self):
        """(num_envs, 3) base linear velocity in (x, y, z) with y = 0."""
        out = np.zeros((self.num_envs, 3))
        out[:, 0] = self.base_lin_vel[:, 0]
        out[:, 2] = self.base_lin_vel[:, 1]
        return out

    def state(self, i=0):
        return SimState(
            base_pos=self.base_pos[i].copy(),
            base_pitch=float(self.base_pitch[i]),
            base_lin_vel=self.base_lin_vel[i].copy(),
            base_pitch_rate=float(self.base_pitch_rate[i]),
            dof_pos=self.dof_pos[i].copy(),
            dof_vel=self.dof_vel[i].copy(),
            foot_contact=self.foot_contact[i].copy(),
            foot_contact_force=self.foot_force[i].copy(),
            foot_vel=self.foot_vel[i].copy(),
            time=float(self.time[i]),
        )

    def frame(self, i=0):
        v = self.history[i, -1]
        d = self.num_dof
        return ObservationFrame(
            command=v[0:3].copy(),
            base_ang_vel=v[3:6].copy(),
            base_rot_xy=v[6:8].copy(),
            dof_pos=v[8 : 8 + d].copy(),
            dof_vel=v[8 + d : 8 + 2 * d].copy(),
            last_action=v[8 + 2 * d : 8 + 3 * d].copy(),
        )

    def draw(self, i=0):
        return RandomizationDraw(
            base_mass_delta=float(self.mass_delta[i]),
            com_shift=float(self.com_shift[i]),
            friction=float(self.friction[i]),
            kp_factor=float(self.kp_factor[i]),
            kd_factor=float(self.kd_factor[i]),
            push_lin=float(self.push_lin[i]),
            push_ang=float(self.push_ang[i]),
            motor_strength=float(self.motor_strength[i]),
            delay_ms=float(self.delay_substeps[i] * self.cfg.physics_dt * 1000.0),
        )

    def mechanical_energy(self, i=None):
        """Model-consistent mechanical energy (lumped base + joint rotors)."""
        mass = self.morph.total_mass + self.mass_delta
        ke_base = 0.5 * mass * np.sum(self.base_lin_vel**2, axis=1)
        ke_pitch = 0.5 * self.morph.base_inertia * self.base_pitch_rate**2
        ke_joints = 0.5 * np.sum(self.morph.joint_inertia * self.dof_vel**2, axis=1)
        pe = mass * self.cfg.gravity * self.base_pos[:, 1]
        total = ke_base + ke_pitch + ke_joints + pe
        return total if i is None else float(total[i])

    def style_features(self):
        """Per-env discriminator features for the current state (matches clip features)."""
        from ..motion.features import transition_features

        return transition_features(
            self.dof_pos, self.dof_vel, self.base_pos[:, 1], self.base_lin_vel
        )

    def curiosity_features(self):
        """(num_envs, num_dof + 3): dof positions, base linear velocity, pitch."""
        return np.hstack([self.dof_pos, self.base_lin_vel, self.base_pitch[:, None]])

    # ------------------------------------------------------------------
    # checkpointed trainer state
    # ------------------------------------------------------------------

    _STATE_ARRAYS = (
        "base_pos", "base_pitch", "base_lin_vel", "base_pitch_rate", "dof_pos",
        "dof_vel", "foot_force", "foot_vel", "time", "episode_step", "command",
        "last_action", "prev_action", "prev_prev_action", "action_ring",
        "friction", "kp_factor", "kd_factor",
        "motor_strength", "mass_delta", "com_shift", "push_lin", "push_ang",
        "delay_substeps", "next_push_step", "history",
    )

    def state_blob(self):
        arrays = {f"env.{name}": getattr(self, name).copy() for name in self._STATE_ARRAYS}
        arrays["env.foot_contact"] = self.foot_contact.astype(np.int64)
        meta = {"env.rng": [rng.bit_generator.state for rng in self._rngs]}
        return arrays, meta

    def load_state_blob(self, arrays, meta):
        for name in self._STATE_ARRAYS:
            current = getattr(self, name)
            loaded = arrays[f"env.{name}"]
            if current.shape != loaded.shape:
                raise ValueError(f"env state {name}: shape {loaded.shape} != {current.shape}")
            setattr(self, name, loaded.astype(current.dtype).copy())
        self.foot_contact = arrays["env.foot_contact"].astype(bool)
        for rng, st in zip(self._rngs, meta["env.rng"]):
            rng.bit_generator.state = st
