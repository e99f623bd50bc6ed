"""Velocity-tracking sweep: abrupt command schedule, seeded episodes, MAE report.

The sweep evaluates a rollout provider: callable(schedule, seed) -> realized
velocity series sampled at the schedule's control dt.  The production provider
wraps a policy checkpoint and the simulator; stubs can exercise the report
machinery directly.
"""

from dataclasses import dataclass, field

import numpy as np

# default sweep: abrupt leaps through [-0.5, 0.75] m/s, 5 s per segment
DEFAULT_SEGMENTS = (-0.5, -0.2, 0.2, 0.5, 0.75, 0.0)
DEFAULT_SEGMENT_S = 5.0
CLIP_SPEED_RANGE = 0.4  # reference motions concentrate within +-0.4 m/s


@dataclass
class TrackingReport:
    dt: float
    command: np.ndarray  # (T,)
    realized: np.ndarray  # (episodes, T)
    segments: list  # (start_idx, end_idx, v_cmd)
    mae: float
    in_range_mae: float
    out_range_mae: float
    per_segment_mae: list

    def recompute_mae(self):
        """MAE from the stored series; must reproduce the reported value."""
        return float(np.mean(np.abs(self.realized - self.command[None, :])))


def build_schedule(segments=DEFAULT_SEGMENTS, segment_s=DEFAULT_SEGMENT_S, dt=0.02):
    steps = int(round(segment_s / dt))
    cmd = np.concatenate([np.full(steps, v) for v in segments])
    bounds = [(i * steps, (i + 1) * steps, v) for i, v in enumerate(segments)]
    return cmd, bounds


def tracking_sweep(rollout_fn, segments=DEFAULT_SEGMENTS, segment_s=DEFAULT_SEGMENT_S,
                   dt=0.02, episodes=20, seed=0):
    """Average tracking error over seeded episodes of the abrupt-step schedule."""
    cmd, bounds = build_schedule(segments, segment_s, dt)
    realized = np.zeros((episodes, len(cmd)))
    for e in range(episodes):
        series = np.asarray(rollout_fn(cmd, seed + e), dtype=np.float64)
        if series.shape != cmd.shape:
            raise ValueError(f"rollout returned {series.shape}, schedule is {cmd.shape}")
        realized[e] = series
    err = np.abs(realized - cmd[None, :])
    in_mask = np.abs(cmd) <= CLIP_SPEED_RANGE
    per_segment = [
        (v, float(err[:, s:t].mean())) for s, t, v in bounds
    ]
    return TrackingReport(
        dt=dt,
        command=cmd,
        realized=realized,
        segments=bounds,
        mae=float(err.mean()),
        in_range_mae=float(err[:, in_mask].mean()),
        out_range_mae=float(err[:, ~in_mask].mean()),
        per_segment_mae=per_segment,
    )


def save_tracking_report(path, report):
    """CSV: header with summary stats, then per-step mean realized velocity."""
    mean_realized = report.realized.mean(axis=0)
    with open(path, "w") as f:
        f.write(f"# mae={report.mae!r},in_range_mae={report.in_range_mae!r},"
                f"out_range_mae={report.out_range_mae!r},episodes={report.realized.shape[0]}\n")
        f.write("time,v_cmd,v_mean\n")
        for i, (c, v) in enumerate(zip(report.command, mean_realized)):
            f.write(f"{i * report.dt!r},{c!r},{v!r}\n")


def policy_rollout_provider(runtime):
    """Wrap a trained runtime into a schedule-following rollout function."""
    import copy

    def rollout(cmd_series, seed):
        env = runtime.make_eval_env(num_envs=1, seed=seed)
        realized = np.zeros(len(cmd_series))
        for t, v_cmd in enumerate(cmd_series):
            env.command[:, 0] = v_cmd
            obs = env.history[:, -1]
            policy_in = runtime.assemble_policy_input(obs, env.history.reshape(1, -1))
            action = runtime.action_offset + runtime.action_scale * runtime.policy.mean(policy_in)
            env.step(action)
            realized[t] = env.base_lin_vel[0, 0]
        return realized

    return rollout
