"""Adversarial imitation module.

A critic network scores transition pairs (feat_t ++ feat_t1).  Two training
criteria are supported: the least-squares criterion with +1/-1 targets, and the
Wasserstein-divergence criterion whose penalty is the p-th power of the critic's
input-gradient norm on real/fake interpolates.  The per-step style reward maps
the critic score into [0, 1].
"""

from dataclasses import dataclass

import numpy as np

from .nets import (
    NetSpec,
    init_params,
    forward,
    backward,
    grad_norm_penalty,
    grad_norm_penalty_fd,
    AdamState,
    adam_step,
)

CRITERIA = ("lsgan", "wgan_div")
REWARD_MAPS = ("lsgan_quadratic", "bounded_sigmoid")


@dataclass
class AdversaryConfig:
    criterion: str = "lsgan"
    wgan_k: float = 2.0
    wgan_p: float = 6.0
    style_weight: float = 1.0
    reward_map: str = None  # defaults to the map matching the criterion
    hidden_widths: tuple = (128, 128)
    learning_rate: float = 1e-3
    updates_per_iteration: int = 2
    grad_clip_norm: float = 10.0
    batch_size: int = 256
    penalty_finite_difference: bool = False  # fallback path for the penalty grads

    def __post_init__(self):
        if self.criterion not in CRITERIA:
            raise ValueError(f"criterion must be one of {CRITERIA}")
        if self.wgan_k < 0:
            raise ValueError("wgan_k must be >= 0")
        if self.wgan_p < 1:
            raise ValueError("wgan_p must be >= 1")
        if self.style_weight < 0:
            raise ValueError("style_weight must be >= 0")
        if self.reward_map is None:
            self.reward_map = "lsgan_quadratic" if self.criterion == "lsgan" else "bounded_sigmoid"
        if self.reward_map not in REWARD_MAPS:
            raise ValueError(f"reward_map must be one of {REWARD_MAPS}")


def pair_input(feat_t, feat_t1):
    """Critic input: concatenated consecutive features; accepts single pairs or batches."""
    feat_t = np.asarray(feat_t, dtype=np.float64)
    feat_t1 = np.asarray(feat_t1, dtype=np.float64)
    if feat_t.shape != feat_t1.shape:
        raise ValueError(f"feature shapes differ: {feat_t.shape} vs {feat_t1.shape}")
    if feat_t.ndim == 1:
        return np.concatenate([feat_t, feat_t1])[None, :]
    return np.hstack([feat_t, feat_t1])


def critic_score(params, feat_t, feat_t1):
    """Deterministic scalar score per pair."""
    x = pair_input(feat_t, feat_t1)
    y, _ = forward(params, x)
    return y[:, 0]


def lsgan_loss(params, real, fake):
    """E_real[(D-1)^2] + E_fake[(D+1)^2]; returns (loss, GradTape)."""
    if len(real) == 0 or len(fake) == 0:
        raise ValueError("empty batch")
    yr, cr = forward(params, real)
    yf, cf = forward(params, fake)
    loss = float(np.mean((yr - 1.0) ** 2) + np.mean((yf + 1.0) ** 2))
    tape = backward(params, cr, 2.0 * (yr - 1.0) / len(real))
    tape.add_(backward(params, cf, 2.0 * (yf + 1.0) / len(fake)))
    return loss, tape


def wgan_div_loss(params, real, fake, k, p, rng, finite_difference=False):
    """E_fake[D] - E_real[D] + k E_xhat[||grad_x D(xhat)||^p]; returns (loss, GradTape).

    xhat are uniform interpolates of randomly re-paired real/fake rows.
    """
    if len(real) == 0 or len(fake) == 0:
        raise ValueError("empty batch")
    yr, cr = forward(params, real)
    yf, cf = forward(params, fake)
    loss = float(np.mean(yf) - np.mean(yr))
    tape = backward(params, cf, np.full_like(yf, 1.0 / len(fake)))
    tape.add_(backward(params, cr, np.full_like(yr, -1.0 / len(real))))
    if k > 0.0:
        m = min(len(real), len(fake))
        ri = rng.permutation(len(real))[:m]
        fi = rng.permutation(len(fake))[:m]
        alpha = rng.uniform(0.0, 1.0, size=(m, 1))
        xhat = alpha * real[ri] + (1.0 - alpha) * fake[fi]
        pen_fn = grad_norm_penalty_fd if finite_difference else grad_norm_penalty
        penalty, _, pen_tape = pen_fn(params, xhat, p)
        loss += k * penalty
        tape.add_(pen_tape, scale=k)
    return loss, tape


def style_reward(score, reward_map):
    """Map critic scores into [0, 1]; monotone non-decreasing on the relevant range."""
    score = np.asarray(score, dtype=np.float64)
    if reward_map == "lsgan_quadratic":
        return np.maximum(0.0, 1.0 - 0.25 * (score - 1.0) ** 2)
    if reward_map == "bounded_sigmoid":
        # stable for large |score|: exponentiate only negative magnitudes
        e = np.exp(-np.abs(score))
        return np.where(score >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))
    raise ValueError(f"unknown reward map {reward_map!r}")


class Discriminator:
    """Critic over transition pairs with the configured training criterion."""

    def __init__(self, feature_dim, cfg=None, rng=None):
        self.cfg = cfg or AdversaryConfig()
        self.feature_dim = feature_dim
        rng = rng or np.random.default_rng(0)
        widths = (2 * feature_dim, *self.cfg.hidden_widths, 1)
        self.params = init_params(NetSpec(widths, "tanh", "identity"), rng, gain=1.0, final_gain=0.1)
        self.opt = AdamState.for_params(self.params)

    def score(self, feat_t, feat_t1):
        return critic_score(self.params, feat_t, feat_t1)

    def reward(self, feat_t, feat_t1):
        return style_reward(self.score(feat_t, feat_t1), self.cfg.reward_map)

    def update(self, real_t, real_t1, fake_t, fake_t1, rng):
        """One criterion step on packed pairs; returns the loss."""
        real = pair_input(real_t, real_t1)
        fake = pair_input(fake_t, fake_t1)
        if self.cfg.criterion == "lsgan":
            loss, tape = lsgan_loss(self.params, real, fake)
        else:
            loss, tape = wgan_div_loss(
                self.params, real, fake, self.cfg.wgan_k, self.cfg.wgan_p, rng,
                finite_difference=self.cfg.penalty_finite_difference,
            )
        tape.clip_norm_(self.cfg.grad_clip_norm)
        adam_step(self.params, tape, self.opt, self.cfg.learning_rate)
        return loss
