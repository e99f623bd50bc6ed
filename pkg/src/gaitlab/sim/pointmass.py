"""Bundled 1-D point-mass velocity-tracking environment.

Same stepping protocol as the biped ensemble but with trivial dynamics:
acceleration-commanded point mass with drag, per-episode velocity command, and
the lin_track reward as its single task term.  Used by the PPO smoke property
and anywhere a fast learnable plant is handy.
"""

import numpy as np

from .rewards import RewardBreakdown


class PointMassEnv:
    obs_dim = 3  # command, noisy velocity, previous action
    action_dim = 1
    hidden_dim = 1

    def __init__(self, num_envs=1, seed=0, history_length=6, episode_steps=150,
                 dt=0.05, drag=0.5, accel_limit=2.0, vel_noise=0.3, cmd_range=(-1.0, 1.0)):
        self.num_envs = num_envs
        self.cfg_history = history_length
        self.episode_steps = episode_steps
        self.dt = dt
        self.drag = drag
        self.accel_limit = accel_limit
        self.vel_noise = vel_noise
        self.cmd_range = cmd_range
        self._root_seed = seed
        self._rngs = None
        self.reset(seed)

    def reset(self, seed=None):
        if seed is not None or self._rngs is None:
            root = self._root_seed if seed is None else seed
            self._root_seed = root
            seq = np.random.SeedSequence(root)
            self._rngs = [np.random.Generator(np.random.PCG64(s)) for s in seq.spawn(self.num_envs)]
        n = self.num_envs
        self.vel = np.zeros(n)
        self.command = np.zeros(n)
        self.last_action = np.zeros((n, 1))
        self.step_count = np.zeros(n, dtype=np.int64)
        self.history = np.zeros((n, self.cfg_history, self.obs_dim))
        self._reset_envs(np.arange(n))
        return self.history[:, -1].copy()

    def _reset_envs(self, ids):
        for i in ids:
            rng = self._rngs[i]
            self.command[i] = rng.uniform(*self.cmd_range)
            self.vel[i] = rng.uniform(-0.2, 0.2)
            self.last_action[i] = 0.0
            self.step_count[i] = 0
        frames = self._observe(ids)
        self.history[ids] = frames[:, None, :]

    def _observe(self, ids):
        frames = np.zeros((len(ids), self.obs_dim))
        frames[:, 0] = self.command[ids]
        frames[:, 1] = self.vel[ids]
        frames[:, 2] = self.last_action[ids, 0]
        for row, i in enumerate(ids):
            frames[row, 1] += self.vel_noise * self._rngs[i].uniform(-1.0, 1.0)
        return frames

    def step(self, action):
        action = np.asarray(action, dtype=np.float64).reshape(self.num_envs, 1)
        if not np.isfinite(action).all():
            raise ValueError("non-finite action")
        a = np.clip(action[:, 0], -self.accel_limit, self.accel_limit)
        self.last_action = action.copy()
        self.vel += (a - self.drag * self.vel) * self.dt
        self.step_count += 1

        raw = np.exp(-4.0 * (self.command - self.vel) ** 2)[:, None]
        breakdown = RewardBreakdown(("lin_track",), raw, np.array([2.4]))

        timeout = self.step_count >= self.episode_steps
        done = timeout.copy()
        obs = self._observe(np.arange(self.num_envs))
        self.history = np.roll(self.history, -1, axis=1)
        self.history[:, -1] = obs
        info = {
            "timeout": timeout,
            "obs": obs.copy(),
            "hidden": self.hidden_state(),
            "history": self.history.copy(),
        }
        if np.any(done):
            self._reset_envs(np.flatnonzero(done))
            obs = self.history[:, -1].copy()
        return obs, breakdown, done, info

    def hidden_state(self):
        return self.vel[:, None].copy()

    def true_velocity3(self):
        out = np.zeros((self.num_envs, 3))
        out[:, 0] = self.vel
        return out

    def style_features(self):
        return None

    def curiosity_features(self):
        return np.stack([self.vel, self.command], axis=1)

    _STATE_ARRAYS = ("vel", "command", "last_action", "step_count", "history")

    def state_blob(self):
        arrays = {f"env.{name}": getattr(self, name).copy() for name in self._STATE_ARRAYS}
        meta = {"env.rng": [rng.bit_generator.state for rng in self._rngs]}
        return arrays, meta

    def load_state_blob(self, arrays, meta):
        for name in self._STATE_ARRAYS:
            current = getattr(self, name)
            setattr(self, name, arrays[f"env.{name}"].astype(current.dtype).copy())
        for rng, st in zip(self._rngs, meta["env.rng"]):
            rng.bit_generator.state = st
