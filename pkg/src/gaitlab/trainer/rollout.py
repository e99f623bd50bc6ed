"""Rollout collection against an immutable policy snapshot."""

from dataclasses import dataclass, field

import numpy as np

from ..curiosity import curiosity_reward


@dataclass
class RolloutBatch:
    """(T, N)-shaped trajectories plus flattened views for updates."""

    policy_in: np.ndarray  # (T, N, Dp)
    critic_in: np.ndarray  # (T, N, Dc)
    actions: np.ndarray  # (T, N, A) pre-offset policy-space actions
    log_probs: np.ndarray  # (T, N)
    values: np.ndarray  # (T, N)
    rewards: np.ndarray  # (T, N) total mixed reward
    dones: np.ndarray  # (T, N) bool
    task_total: np.ndarray  # (T, N) weighted task reward
    term_raw: dict  # name -> (T, N) raw term values
    style_rewards: np.ndarray  # (T, N) r^s (zeros when off)
    curiosity_rewards: np.ndarray  # (T, N) r^c (zeros when off)
    hist_t: np.ndarray  # (T, N, H*D) histories fed to the estimator
    hist_t1: np.ndarray  # (T, N, H*D) next-step histories (pre-reset)
    v_true: np.ndarray  # (T, N, 3) hidden base velocity at t
    feat_t: np.ndarray  # (T, N, F) style features at t (zeros when off)
    feat_t1: np.ndarray  # (T, N, F)
    bootstrap_value: np.ndarray  # (N,)
    episode_returns: list  # completed-episode weighted task returns
    episode_lengths: list

    @property
    def horizon(self):
        return self.rewards.shape[0]

    @property
    def num_envs(self):
        return self.rewards.shape[1]

    def flat(self, arr):
        return arr.reshape(arr.shape[0] * arr.shape[1], *arr.shape[2:])


def collect_rollouts(rt, T):
    """T control steps on every env in the ensemble; see RolloutBatch for layout."""
    env = rt.env
    n = env.num_envs
    use_style = rt.disc is not None and rt.dataset is not None
    feat_dim = rt.feature_dim if use_style else 1

    shapes = {
        "policy_in": (T, n, rt.policy_input_dim),
        "critic_in": (T, n, rt.critic_input_dim),
        "actions": (T, n, env.action_dim),
        "log_probs": (T, n),
        "values": (T, n),
        "rewards": (T, n),
        "task_total": (T, n),
        "style_rewards": (T, n),
        "curiosity_rewards": (T, n),
        "hist_t": (T, n, rt.history_dim),
        "hist_t1": (T, n, rt.history_dim),
        "v_true": (T, n, 3),
        "feat_t": (T, n, feat_dim),
        "feat_t1": (T, n, feat_dim),
    }
    buf = {k: np.zeros(v) for k, v in shapes.items()}
    buf["dones"] = np.zeros((T, n), dtype=bool)
    term_raw = {name: np.zeros((T, n)) for name in rt.term_names}
    episode_returns, episode_lengths = [], []

    for t in range(T):
        hist = env.history.reshape(n, -1)
        hidden = env.hidden_state()
        obs = env.history[:, -1]
        policy_in = rt.assemble_policy_input(obs, hist)
        critic_in = rt.assemble_critic_input(obs, hidden)
        a_pol, logp, _ = rt.policy.sample(policy_in, rt.rng)
        value = rt.value.value(critic_in)
        v_true = env.true_velocity3()
        feat_t = rt.features_from_hidden(hidden) if use_style else None
        if rt.curiosity is not None:
            c_feats = env.curiosity_features()

        action = rt.action_offset + rt.action_scale * a_pol
        obs_next, breakdown, done, info = env.step(action)

        total = breakdown.total.copy()
        task_total = breakdown.total.copy()

        if use_style:
            feat_t1 = rt.features_from_hidden(info["hidden"])
            r_style = rt.disc.reward(feat_t, feat_t1)
            total = total + rt.style_weight * r_style
            buf["feat_t"][t] = feat_t
            buf["feat_t1"][t] = feat_t1
            buf["style_rewards"][t] = r_style

        if rt.curiosity is not None:
            rt.curiosity.update_whitener(c_feats)
            codes = rt.curiosity.hash_batch(c_feats)
            r_cur = np.array([curiosity_reward(rt.counts.observe_and_count(c)) for c in codes])
            total = total + r_cur
            buf["curiosity_rewards"][t] = r_cur

        # timeouts bootstrap through the terminal state's value
        timeout = info["timeout"]
        if np.any(timeout):
            term_critic = rt.assemble_critic_input(info["obs"], info["hidden"])
            term_value = rt.value.value(term_critic)
            total = total + rt.gamma * term_value * timeout

        buf["policy_in"][t] = policy_in
        buf["critic_in"][t] = critic_in
        buf["actions"][t] = a_pol
        buf["log_probs"][t] = logp
        buf["values"][t] = value
        buf["rewards"][t] = total
        buf["dones"][t] = done
        buf["task_total"][t] = task_total
        buf["hist_t"][t] = hist
        buf["hist_t1"][t] = info["history"].reshape(n, -1)
        buf["v_true"][t] = v_true
        for name in rt.term_names:
            term_raw[name][t] = breakdown.term(name)

        rt.episode_task_return += task_total
        rt.episode_length += 1
        if np.any(done):
            for i in np.flatnonzero(done):
                episode_returns.append(float(rt.episode_task_return[i]))
                episode_lengths.append(int(rt.episode_length[i]))
            rt.episode_task_return[done] = 0.0
            rt.episode_length[done] = 0

    hist = env.history.reshape(n, -1)
    bootstrap = rt.value.value(rt.assemble_critic_input(env.history[:, -1], env.hidden_state()))

    return RolloutBatch(
        policy_in=buf["policy_in"],
        critic_in=buf["critic_in"],
        actions=buf["actions"],
        log_probs=buf["log_probs"],
        values=buf["values"],
        rewards=buf["rewards"],
        dones=buf["dones"],
        task_total=buf["task_total"],
        term_raw=term_raw,
        style_rewards=buf["style_rewards"],
        curiosity_rewards=buf["curiosity_rewards"],
        hist_t=buf["hist_t"],
        hist_t1=buf["hist_t1"],
        v_true=buf["v_true"],
        feat_t=buf["feat_t"],
        feat_t1=buf["feat_t1"],
        bootstrap_value=bootstrap,
        episode_returns=episode_returns,
        episode_lengths=episode_lengths,
    )
