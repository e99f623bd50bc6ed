"""Anthropomorphism scoring: DTW distance between policy rollouts and the
reference clip of matching gait, averaged over seeded rollouts."""

import numpy as np

from ..motion import default_clipset
from ..config import build_morphology
from .dtw import dtw_distance

# command per movement category: (label shown, clip label, commanded velocity)
DEFAULT_CASES = (
    ("walking", "walk", 0.4),
    ("jogging", "run", 1.0),
    ("walking_backwards", "walk", -0.4),
)


def rollout_joint_positions(rt, v_cmd, seed, steps):
    env = rt.make_eval_env(num_envs=1, seed=seed)
    out = np.zeros((steps, env.num_dof))
    for t in range(steps):
        env.command[:, 0] = v_cmd
        policy_in = rt.assemble_policy_input(env.history[:, -1], env.history.reshape(1, -1))
        action = rt.action_offset + rt.action_scale * rt.policy.mean(policy_in)
        env.step(action)
        out[t] = env.dof_pos[0]
    return out


def dtw_eval(rt, episodes=20, seed=0, cases=DEFAULT_CASES):
    """Per-case mean/std DTW distance in joint positions vs the matching clip."""
    morph = build_morphology(rt.cfg)
    clips = default_clipset(
        morph, dt=rt.cfg["motion.clip_dt"], duration=rt.cfg["motion.clip_duration"],
        walk_speeds=rt.cfg["motion.walk_speeds"], run_speeds=rt.cfg["motion.run_speeds"],
    )
    rows = []
    for name, label, v_cmd in cases:
        ref = min(
            (c for c in clips if c.label == label),
            key=lambda c: abs(c.nominal_speed - v_cmd),
        )
        steps = len(ref.frames)
        dists = []
        for e in range(episodes):
            joints = rollout_joint_positions(rt, v_cmd, seed + e, steps)
            dists.append(dtw_distance(joints, ref.dof_pos).distance)
        rows.append((name, float(np.mean(dists)), float(np.std(dists)), len(dists)))
    return rows


def save_dtw_results(path, rows):
    with open(path, "w") as f:
        f.write("case,mean_dtw,std_dtw,episodes\n")
        for name, mean, std, n in rows:
            f.write(f"{name},{mean!r},{std!r},{n}\n")
