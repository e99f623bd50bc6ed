"""Generalized advantage estimation over (T, N) rollout arrays."""

import numpy as np


def compute_gae(rewards, values, dones, bootstrap, gamma, lam):
    """Standard GAE recursion.

    rewards, values, dones: (T, N); bootstrap: (N,) value of the state after
    the last step.  A done step cuts the recursion (timeout bootstraps are
    folded into the reward upstream).  Returns (advantages, value_targets).
    """
    rewards = np.asarray(rewards, dtype=np.float64)
    T, n = rewards.shape
    adv = np.zeros((T, n))
    gae = np.zeros(n)
    next_value = np.asarray(bootstrap, dtype=np.float64)
    for t in range(T - 1, -1, -1):
        not_done = 1.0 - dones[t].astype(np.float64)
        delta = rewards[t] + gamma * next_value * not_done - values[t]
        gae = delta + gamma * lam * not_done * gae
        adv[t] = gae
        next_value = values[t]
    return adv, adv + values


def normalize_advantages(adv):
    flat = adv.ravel()
    std = flat.std()
    if std < 1e-8:
        return adv - flat.mean()
    return (adv - flat.mean()) / std
