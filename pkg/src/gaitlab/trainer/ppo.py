"""Clipped-surrogate PPO update plus the jointly-optimized estimator and
discriminator steps for one iteration."""

import numpy as np

from ..nets import forward, backward, adam_step
from .gae import compute_gae, normalize_advantages
from .policy import LOG_2PI


def ppo_update(rt, batch):
    """Epochs x minibatches of policy/value/estimator updates on one rollout.

    Returns a stats dict (losses, KL estimate, clip fraction).
    """
    cfg = rt
    adv, targets = compute_gae(
        batch.rewards, batch.values, batch.dones, batch.bootstrap_value, rt.gamma, rt.lam
    )
    adv = normalize_advantages(adv)

    policy_in = batch.flat(batch.policy_in)
    critic_in = batch.flat(batch.critic_in)
    actions = batch.flat(batch.actions)
    logp_old = batch.flat(batch.log_probs)
    adv_flat = batch.flat(adv)
    target_flat = batch.flat(targets)
    hist_t = batch.flat(batch.hist_t)
    hist_t1 = batch.flat(batch.hist_t1)
    v_true = batch.flat(batch.v_true)
    not_done = ~batch.flat(batch.dones)

    total = policy_in.shape[0]
    mb_size = total // rt.minibatches
    stats = {
        "policy_loss": 0.0, "value_loss": 0.0, "entropy": rt.policy.entropy(),
        "kl": 0.0, "clip_frac": 0.0, "vel_loss": 0.0, "contrastive_loss": 0.0,
        "updates": 0, "skipped": 0,
    }

    for _ in range(rt.epochs):
        order = rt.rng.permutation(total)
        for m in range(rt.minibatches):
            idx = order[m * mb_size : (m + 1) * mb_size]
            if len(idx) == 0:
                continue
            ok = _policy_value_step(rt, policy_in[idx], critic_in[idx], actions[idx],
                                    logp_old[idx], adv_flat[idx], target_flat[idx], stats)
            if not ok:
                stats["skipped"] += 1
            if rt.him is not None:
                mask = not_done[idx]
                if mask.sum() >= 2:
                    v_loss, c_loss = _him_step(rt, hist_t[idx], hist_t1[idx], v_true[idx], mask)
                    stats["vel_loss"] += v_loss
                    stats["contrastive_loss"] += c_loss
    k = max(1, stats["updates"])
    for key in ("policy_loss", "value_loss", "kl", "clip_frac"):
        stats[key] /= k
    hk = max(1, rt.epochs * rt.minibatches)
    stats["vel_loss"] /= hk
    stats["contrastive_loss"] /= hk
    return stats, adv, targets


def _him_step(rt, hist_t, hist_t1, v_true, mask):
    """Estimator step on same-episode rows only (a done step's t+1 history
    belongs to the next episode, so it is no prediction target).  Rows are
    capped: InfoNCE cost grows with the square of the batch."""
    idx = mask.nonzero()[0]
    if len(idx) > rt.him_update_rows:
        idx = rt.rng.choice(idx, size=rt.him_update_rows, replace=False)
    return rt.him.update(hist_t[idx], hist_t1[idx], v_true[idx])


def _policy_value_step(rt, x_pi, x_v, actions, logp_old, adv, target, stats):
    policy = rt.policy
    mu, cache_pi = forward(policy.params, x_pi)
    std = np.exp(policy.log_std)
    zs = (actions - mu) / std
    logp = -0.5 * np.sum(zs * zs + 2.0 * policy.log_std + LOG_2PI, axis=1)
    ratio = np.exp(logp - logp_old)
    b = len(adv)

    s1 = ratio * adv
    s2 = np.clip(ratio, 1.0 - rt.clip_eps, 1.0 + rt.clip_eps) * adv
    surrogate = -np.mean(np.minimum(s1, s2))
    active = s1 <= s2  # gradient flows only through the unclipped branch
    dl_dlogp = np.where(active, -ratio * adv, 0.0) / b

    # chain into the mean and the shared log-std
    dlogp_dmu = zs / std
    grad_mu = dl_dlogp[:, None] * dlogp_dmu
    dlogp_dlogstd = zs * zs - 1.0
    grad_logstd = (dl_dlogp[:, None] * dlogp_dlogstd).sum(axis=0)
    grad_logstd -= rt.entropy_coef  # entropy bonus: d(entropy)/d(log_std) = 1

    tape_pi = backward(policy.params, cache_pi, grad_mu)

    v, cache_v = forward(rt.value.params, x_v)
    v = v[:, 0]
    v_err = v - target
    value_loss = float(np.mean(v_err**2))
    tape_v = backward(rt.value.params, cache_v, (rt.value_coef * 2.0 * v_err / b)[:, None])

    if not (np.isfinite(surrogate) and np.isfinite(value_loss)):
        return False
    ok_pi = adam_step(policy.params, tape_pi, policy.opt, rt.learning_rate)
    policy.log_std_opt.step(policy.log_std, grad_logstd, rt.learning_rate)
    ok_v = adam_step(rt.value.params, tape_v, rt.value.opt, rt.learning_rate)

    stats["policy_loss"] += float(surrogate)
    stats["value_loss"] += value_loss
    stats["kl"] += float(np.mean(logp_old - logp))
    stats["clip_frac"] += float(np.mean(np.abs(ratio - 1.0) > rt.clip_eps))
    stats["updates"] += 1
    return ok_pi and ok_v


def discriminator_update(rt, batch):
    """Criterion steps on reference pairs vs this iteration's policy transitions."""
    if rt.disc is None or rt.dataset is None:
        return 0.0
    feat_t = batch.flat(batch.feat_t)
    feat_t1 = batch.flat(batch.feat_t1)
    keep = ~batch.flat(batch.dones)
    feat_t, feat_t1 = feat_t[keep], feat_t1[keep]
    if len(feat_t) == 0:
        return 0.0
    loss = 0.0
    updates = rt.disc.cfg.updates_per_iteration
    for _ in range(updates):
        real_t, real_t1 = rt.dataset.sample_pairs(rt.disc.cfg.batch_size, rt.rng)
        fake_idx = rt.rng.integers(0, len(feat_t), size=min(rt.disc.cfg.batch_size, len(feat_t)))
        loss += rt.disc.update(real_t, real_t1, feat_t[fake_idx], feat_t1[fake_idx], rt.rng)
    return loss / max(1, updates)
