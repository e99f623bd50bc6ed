"""Diagonal-Gaussian policy head and value function over grad-net MLPs.

The policy outputs an action mean; the log standard deviation is a learned
state-independent vector.  Actions map to joint targets through a constant
offset and scale owned by the runtime (identity for the point mass).
"""

import numpy as np

from ..nets import NetSpec, init_params, forward, backward, AdamState, VectorAdam, adam_step

LOG_2PI = np.log(2.0 * np.pi)


class GaussianPolicy:
    def __init__(self, input_dim, action_dim, hidden, rng, init_log_std=-1.0):
        widths = (input_dim, *hidden, action_dim)
        self.params = init_params(NetSpec(widths, "elu", "identity"), rng, gain=1.0, final_gain=0.01)
        self.log_std = np.full(action_dim, float(init_log_std))
        self.opt = AdamState.for_params(self.params)
        self.log_std_opt = VectorAdam.for_vector(self.log_std)
        self.action_dim = action_dim

    def mean(self, x):
        y, _ = forward(self.params, x)
        return y

    def sample(self, x, rng):
        """Returns (action, log_prob, mean).  One RNG draw per call, batch-shaped."""
        mu = self.mean(x)
        std = np.exp(self.log_std)
        eps = rng.standard_normal(mu.shape)
        a = mu + std * eps
        return a, self.log_prob_of(mu, a), mu

    def log_prob_of(self, mu, a):
        std = np.exp(self.log_std)
        zs = (a - mu) / std
        return -0.5 * np.sum(zs * zs + 2.0 * self.log_std + LOG_2PI, axis=1)

    def entropy(self):
        return float(np.sum(self.log_std + 0.5 * (LOG_2PI + 1.0)))


class ValueFunction:
    def __init__(self, input_dim, hidden, rng):
        widths = (input_dim, *hidden, 1)
        self.params = init_params(NetSpec(widths, "elu", "identity"), rng, gain=1.0, final_gain=1.0)
        self.opt = AdamState.for_params(self.params)

    def value(self, x):
        y, _ = forward(self.params, x)
        return y[:, 0]
