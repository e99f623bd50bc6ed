"""Mode-coverage benchmark: adversarial training of a small generator on an
8-mode 2-D Gaussian mixture, comparing the two criteria's ability to keep
every mode populated.  A mode counts as recovered when at least `min_frac` of
generator samples land within 3 sigma of its center."""

from dataclasses import dataclass

import numpy as np

from .adversary import lsgan_loss, wgan_div_loss
from .nets import NetSpec, init_params, forward, backward, AdamState, adam_step

NUM_MODES = 8
MODE_RADIUS = 2.0
MODE_SIGMA = 0.1


def mode_centers():
    angles = 2.0 * np.pi * np.arange(NUM_MODES) / NUM_MODES
    return MODE_RADIUS * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def sample_mixture(rng, n):
    centers = mode_centers()
    idx = rng.integers(0, NUM_MODES, size=n)
    return centers[idx] + MODE_SIGMA * rng.standard_normal((n, 2))


def count_recovered_modes(samples, min_frac=0.02):
    centers = mode_centers()
    d = np.linalg.norm(samples[:, None, :] - centers[None, :, :], axis=2)
    hits = d <= 3.0 * MODE_SIGMA
    frac = hits.mean(axis=0)
    return int(np.sum(frac >= min_frac))


@dataclass
class GanResult:
    criterion: str
    modes: int
    samples: np.ndarray


OUTPUT_SPAN = 3.0  # generator range tanh * span covers the mode ring


def train_toy_generator(criterion, seed, steps=3000, batch=256, latent_dim=4,
                        d_lr=2e-3, g_lr=1e-3, k=2.0, p=6.0, critic_steps=2, eval_samples=2000):
    """Train G against D under the given criterion; returns recovered-mode count."""
    rng = np.random.default_rng(seed)
    g_params = init_params(NetSpec((latent_dim, 32, 32, 2), "tanh", "tanh"), rng, gain=1.0)
    d_params = init_params(NetSpec((2, 32, 32, 1), "tanh", "identity"), rng, gain=1.0, final_gain=0.1)
    g_opt = AdamState.for_params(g_params)
    d_opt = AdamState.for_params(d_params)

    def generate(z):
        y, cache = forward(g_params, z)
        return OUTPUT_SPAN * y, cache

    for _ in range(steps):
        for _ in range(critic_steps):
            real = sample_mixture(rng, batch)
            z = rng.standard_normal((batch, latent_dim))
            fake, _ = generate(z)
            if criterion == "lsgan":
                _, d_tape = lsgan_loss(d_params, real, fake)
            else:
                _, d_tape = wgan_div_loss(d_params, real, fake, k, p, rng)
            d_tape.clip_norm_(10.0)
            adam_step(d_params, d_tape, d_opt, d_lr)

        # generator step: push D's verdict on fresh fakes toward "real"
        z = rng.standard_normal((batch, latent_dim))
        fake, g_cache = generate(z)
        scores, d_cache = forward(d_params, fake)
        if criterion == "lsgan":
            dl_dscore = 2.0 * (scores - 1.0) / batch  # E[(D(G(z)) - 1)^2]
        else:
            dl_dscore = np.full_like(scores, -1.0 / batch)  # -E[D(G(z))]
        dl_dfake = backward(d_params, d_cache, dl_dscore).d_input
        g_tape = backward(g_params, g_cache, OUTPUT_SPAN * dl_dfake)
        g_tape.clip_norm_(10.0)
        adam_step(g_params, g_tape, g_opt, g_lr)

    z = np.random.default_rng(seed + 10_000).standard_normal((eval_samples, latent_dim))
    samples, _ = generate(z)
    return GanResult(criterion, count_recovered_modes(samples), samples)


def compare_mode_coverage(seeds=(0, 1, 2, 3, 4), steps=3000):
    """Median recovered modes per criterion across seeds."""
    results = {"lsgan": [], "wgan_div": []}
    for seed in seeds:
        for criterion in results:
            results[criterion].append(train_toy_generator(criterion, seed, steps=steps).modes)
    medians = {c: float(np.median(v)) for c, v in results.items()}
    return medians, results
