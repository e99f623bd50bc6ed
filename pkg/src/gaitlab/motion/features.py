"""Discriminator transition features and reference-pair sampling.

The feature map is the single source of truth: live rollouts and clip sampling
both call transition_features, so the two paths agree bit-for-bit on the same
numbers.
"""

from dataclasses import dataclass

import numpy as np

FEATURE_NAMES = ("dof_pos", "dof_vel", "base_height", "base_lin_vel")


def transition_features(dof_pos, dof_vel, base_height, base_lin_vel):
    """Per-state feature vector(s): [dof_pos, dof_vel, base_height, base_lin_vel].

    Accepts single states (1-D pieces) or batches (2-D pieces).
    """
    dof_pos = np.asarray(dof_pos, dtype=np.float64)
    if dof_pos.ndim == 1:
        return np.concatenate(
            [
                dof_pos,
                np.asarray(dof_vel, dtype=np.float64),
                np.atleast_1d(np.float64(base_height)),
                np.asarray(base_lin_vel, dtype=np.float64),
            ]
        )
    return np.hstack(
        [
            dof_pos,
            np.asarray(dof_vel, dtype=np.float64),
            np.asarray(base_height, dtype=np.float64).reshape(-1, 1),
            np.asarray(base_lin_vel, dtype=np.float64),
        ]
    )


def feature_dim(num_dof):
    return 2 * num_dof + 3


@dataclass
class TransitionPair:
    feat_t: np.ndarray
    feat_t1: np.ndarray


class TransitionDataset:
    """Immutable bank of per-clip feature sequences; sampling is read-only.

    Clip dof velocities are forward finite differences of dof positions at the
    clip dt, matching how consecutive control frames relate.
    """

    def __init__(self, clips, expected_dt=None):
        if not clips:
            raise ValueError("empty clip dataset")
        self.clips = list(clips)
        self.features = []
        for clip in self.clips:
            if len(clip.frames) < 2:
                raise ValueError(f"clip {clip.label!r} has fewer than 2 frames")
            if expected_dt is not None and abs(clip.dt - expected_dt) > 1e-12:
                raise ValueError(
                    f"clip {clip.label!r} dt {clip.dt} != control dt {expected_dt}"
                )
            q = clip.dof_pos
            dq = np.vstack([(q[1:] - q[:-1]) / clip.dt, (q[-1:] - q[-2:-1]) / clip.dt])
            self.features.append(
                transition_features(q, dq, clip.base_height, clip.base_lin_vel)
            )
        self._pair_counts = np.array([len(f) - 1 for f in self.features])
        self._cum = np.cumsum(self._pair_counts)

    @property
    def num_pairs(self):
        return int(self._cum[-1])

    @property
    def dim(self):
        return self.features[0].shape[1]

    def sample_pairs(self, batch, rng):
        """Uniform over all (clip, frame) transition pairs; returns (feat_t, feat_t1) arrays."""
        if batch == 0:
            d = self.dim
            return np.zeros((0, d)), np.zeros((0, d))
        flat = rng.integers(0, self.num_pairs, size=batch)
        clip_idx = np.searchsorted(self._cum, flat, side="right")
        frame_idx = flat - np.concatenate([[0], self._cum[:-1]])[clip_idx]
        feat_t = np.zeros((batch, self.dim))
        feat_t1 = np.zeros((batch, self.dim))
        for i, (c, f) in enumerate(zip(clip_idx, frame_idx)):
            feat_t[i] = self.features[c][f]
            feat_t1[i] = self.features[c][f + 1]
        return feat_t, feat_t1

    def sample_transition_pairs(self, batch, rng):
        feat_t, feat_t1 = self.sample_pairs(batch, rng)
        return [TransitionPair(a, b) for a, b in zip(feat_t, feat_t1)]
