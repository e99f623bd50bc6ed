"""Hybrid internal-model estimator.

Encodes the H-frame observation history into an explicit base-velocity estimate
(supervised against the simulator's hidden state) and a unit-norm latent
embedding trained contrastively: the latent at t must identify the embedding of
the history at t+1 among the batch (InfoNCE over cosine similarities).  The
target branch shares the trunk but uses its own projection head and is held
constant during the backward pass.
"""

from dataclasses import dataclass

import numpy as np

from .nets import NetSpec, init_params, forward, backward, AdamState, adam_step

VEL_DIM = 3
_Z_FALLBACK_AXIS = 0  # unit vector used when the raw embedding is exactly zero


@dataclass
class HimOutput:
    v_hat: np.ndarray  # (3,) or (B, 3)
    z: np.ndarray  # unit-norm, (d_z,) or (B, d_z)


def normalize_rows(x, fallback_axis=_Z_FALLBACK_AXIS):
    """L2-normalize rows; exactly-zero rows map to a fixed fallback axis."""
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    out = np.zeros_like(x)
    ok = norms[..., 0] > 1e-12
    out[ok] = x[ok] / norms[ok]
    if np.any(~ok):
        out[~ok, fallback_axis] = 1.0
    return out


def velocity_loss(v_hat, v_true):
    """Mean squared error over every element; returns (loss, dloss/dv_hat)."""
    v_hat = np.atleast_2d(np.asarray(v_hat, dtype=np.float64))
    v_true = np.atleast_2d(np.asarray(v_true, dtype=np.float64))
    if v_hat.shape != v_true.shape:
        raise ValueError(f"shape mismatch {v_hat.shape} vs {v_true.shape}")
    diff = v_hat - v_true
    loss = float(np.mean(diff**2))
    return loss, 2.0 * diff / diff.size


def contrastive_loss(z, targets, temperature):
    """InfoNCE over cosine similarities; targets are constants (stop-gradient).

    z, targets: (B, d) unit-norm rows; positive pairs share the row index.
    Returns (loss, dloss/dz).
    """
    z = np.atleast_2d(np.asarray(z, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    b = z.shape[0]
    if b < 2:
        raise ValueError("contrastive loss needs a batch of at least 2 (negatives)")
    if z.shape != targets.shape:
        raise ValueError(f"shape mismatch {z.shape} vs {targets.shape}")
    logits = z @ targets.T / temperature
    logits -= logits.max(axis=1, keepdims=True)  # stable softmax
    expl = np.exp(logits)
    softmax = expl / expl.sum(axis=1, keepdims=True)
    loss = float(np.mean(-np.log(np.maximum(softmax[np.arange(b), np.arange(b)], 1e-300))))
    grad_logits = softmax.copy()
    grad_logits[np.arange(b), np.arange(b)] -= 1.0
    grad_z = grad_logits @ targets / (temperature * b)
    return loss, grad_z


@dataclass
class HimConfig:
    latent_dim: int = 16
    temperature: float = 0.1
    trunk_widths: tuple = (128, 128)
    velocity_weight: float = 1.0
    contrastive_weight: float = 1.0
    learning_rate: float = 1e-3


class HimEstimator:
    """Trunk MLP over the flattened history plus three linear heads:
    velocity estimate, online latent, and the stop-gradient target projection."""

    def __init__(self, history_dim, cfg=None, rng=None):
        self.cfg = cfg or HimConfig()
        self.history_dim = history_dim
        rng = rng or np.random.default_rng(0)
        widths = (history_dim, *self.cfg.trunk_widths)
        self.trunk = init_params(NetSpec(widths, "elu", "tanh"), rng, gain=1.0)
        trunk_out = widths[-1]
        self.v_head = init_params(NetSpec((trunk_out, VEL_DIM)), rng, gain=0.1)
        self.z_head = init_params(NetSpec((trunk_out, self.cfg.latent_dim)), rng, gain=1.0)
        self.target_head = init_params(NetSpec((trunk_out, self.cfg.latent_dim)), rng, gain=1.0)
        self.opt = {
            "trunk": AdamState.for_params(self.trunk),
            "v_head": AdamState.for_params(self.v_head),
            "z_head": AdamState.for_params(self.z_head),
            "target_head": AdamState.for_params(self.target_head),
        }

    def encode(self, history):
        """history: (B, H, obs_dim) or flat (B, H*obs_dim) -> HimOutput batch."""
        flat = self._flatten(history)
        trunk_out, _ = forward(self.trunk, flat)
        v_hat, _ = forward(self.v_head, trunk_out)
        z_raw, _ = forward(self.z_head, trunk_out)
        return HimOutput(v_hat=v_hat, z=normalize_rows(z_raw))

    def encode_single(self, history):
        out = self.encode(history[None] if history.ndim == 2 else history.reshape(1, -1))
        return HimOutput(v_hat=out.v_hat[0], z=out.z[0])

    def _flatten(self, history):
        history = np.asarray(history, dtype=np.float64)
        if history.ndim == 3:
            history = history.reshape(history.shape[0], -1)
        if history.shape[1] != self.history_dim:
            raise ValueError(f"history width {history.shape[1]} != {self.history_dim}")
        return history

    def target_embeddings(self, history_next):
        """Stop-gradient targets from the t+1 histories."""
        flat = self._flatten(history_next)
        trunk_out, _ = forward(self.trunk, flat)
        y_raw, _ = forward(self.target_head, trunk_out)
        return normalize_rows(y_raw)

    def update(self, history, history_next, v_true):
        """Joint supervised + contrastive step; returns (velocity_loss, contrastive_loss)."""
        cfg = self.cfg
        flat = self._flatten(history)
        trunk_out, trunk_cache = forward(self.trunk, flat)
        v_hat, v_cache = forward(self.v_head, trunk_out)
        z_raw, z_cache = forward(self.z_head, trunk_out)
        z = normalize_rows(z_raw)
        targets = self.target_embeddings(history_next)

        v_loss, dv = velocity_loss(v_hat, v_true)
        c_loss, dz = contrastive_loss(z, targets, cfg.temperature)

        # back through the normalization: d z_raw = (I - z z^T) / ||z_raw|| dz
        norms = np.linalg.norm(z_raw, axis=1, keepdims=True)
        safe = np.maximum(norms, 1e-12)
        dz_raw = (dz - z * np.sum(dz * z, axis=1, keepdims=True)) / safe
        dz_raw[norms[:, 0] <= 1e-12] = 0.0

        v_tape = backward(self.v_head, v_cache, cfg.velocity_weight * dv)
        z_tape = backward(self.z_head, z_cache, cfg.contrastive_weight * dz_raw)
        trunk_grad = v_tape.d_input + z_tape.d_input
        trunk_tape = backward(self.trunk, trunk_cache, trunk_grad)

        lr = cfg.learning_rate
        adam_step(self.v_head, v_tape, self.opt["v_head"], lr)
        adam_step(self.z_head, z_tape, self.opt["z_head"], lr)
        adam_step(self.trunk, trunk_tape, self.opt["trunk"], lr)
        # the target projection head stays at its init: targets move only
        # through the shared trunk, and never receive gradients themselves
        return v_loss, c_loss

    def param_sets(self):
        return {
            "him_trunk": self.trunk,
            "him_v": self.v_head,
            "him_z": self.z_head,
            "him_target": self.target_head,
        }
