"""Adaptive-moment optimizer over NetParams/GradTape pairs."""

from dataclasses import dataclass

import numpy as np

from .mlp import NetParams, GradTape


@dataclass
class AdamState:
    m_weights: list
    m_biases: list
    v_weights: list
    v_biases: list
    step_count: int = 0

    @staticmethod
    def for_params(params):
        return AdamState(
            [np.zeros_like(w) for w in params.weights],
            [np.zeros_like(b) for b in params.biases],
            [np.zeros_like(w) for w in params.weights],
            [np.zeros_like(b) for b in params.biases],
        )

    def flat_arrays(self, prefix):
        out = []
        for i in range(len(self.m_weights)):
            out.append((f"{prefix}.mw{i}", self.m_weights[i]))
            out.append((f"{prefix}.mb{i}", self.m_biases[i]))
            out.append((f"{prefix}.vw{i}", self.v_weights[i]))
            out.append((f"{prefix}.vb{i}", self.v_biases[i]))
        return out


def adam_step(params, tape, state, lr, beta1=0.9, beta2=0.999, eps=1e-8):
    """One bias-corrected update in place.  Non-finite gradients reject the step.

    Returns True if applied, False if rejected.
    """
    if not tape.all_finite():
        return False
    state.step_count += 1
    t = state.step_count
    c1 = 1.0 - beta1**t
    c2 = 1.0 - beta2**t
    for group in (
        zip(params.weights, tape.d_weights, state.m_weights, state.v_weights),
        zip(params.biases, tape.d_biases, state.m_biases, state.v_biases),
    ):
        for p, g, m, v in group:
            m *= beta1
            m += (1.0 - beta1) * g
            v *= beta2
            v += (1.0 - beta2) * g * g
            p -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
    return True


@dataclass
class VectorAdam:
    """Adam over a single flat vector (used for the policy log-std)."""

    m: np.ndarray
    v: np.ndarray
    step_count: int = 0

    @staticmethod
    def for_vector(x):
        return VectorAdam(np.zeros_like(x), np.zeros_like(x))

    def step(self, x, g, lr, beta1=0.9, beta2=0.999, eps=1e-8):
        if not np.isfinite(g).all():
            return False
        self.step_count += 1
        t = self.step_count
        self.m = beta1 * self.m + (1.0 - beta1) * g
        self.v = beta2 * self.v + (1.0 - beta2) * g * g
        mhat = self.m / (1.0 - beta1**t)
        vhat = self.v / (1.0 - beta2**t)
        x -= lr * mhat / (np.sqrt(vhat) + eps)
        return True
