import numpy as np
import pytest

from gaitlab.him import (
    HimEstimator,
    HimConfig,
    velocity_loss,
    contrastive_loss,
    normalize_rows,
)
from helpers import fd_vector_grad, rel_err


def test_velocity_loss_zero_at_match():
    v = np.random.default_rng(0).normal(size=(5, 3))
    loss, grad = velocity_loss(v, v)
    assert loss == 0.0
    assert np.all(grad == 0.0)


def test_velocity_loss_component_mean():
    loss, _ = velocity_loss(np.zeros(3), np.array([1.0, 0.0, 0.0]))
    assert loss == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_velocity_loss_gradient_matches_fd():
    rng = np.random.default_rng(1)
    v_hat = rng.normal(size=(4, 3))
    v_true = rng.normal(size=(4, 3))

    def f(v):
        return velocity_loss(v, v_true)[0]

    _, grad = velocity_loss(v_hat, v_true)
    fd = fd_vector_grad(v_hat.copy(), f)
    assert rel_err(grad, fd) < 1e-4


def test_contrastive_identical_rows_log_batch():
    z = np.tile(normalize_rows(np.array([[1.0, 2.0, -0.5]])), (6, 1))
    loss, _ = contrastive_loss(z, z, temperature=0.1)
    assert loss == pytest.approx(np.log(6.0), abs=1e-12)


def test_contrastive_perfect_alignment_near_zero():
    # positive similarity 1, negative -1, tau 0.1 -> loss below 0.01
    z = np.array([[1.0, 0.0], [-1.0, 0.0]])
    loss, _ = contrastive_loss(z, z.copy(), temperature=0.1)
    assert loss < 0.01


def test_contrastive_needs_negatives():
    z = np.ones((1, 4))
    with pytest.raises(ValueError, match="at least 2"):
        contrastive_loss(z, z, 0.1)


def test_contrastive_gradient_matches_fd():
    rng = np.random.default_rng(2)
    z = normalize_rows(rng.normal(size=(5, 8)))
    targets = normalize_rows(rng.normal(size=(5, 8)))

    def f(zz):
        return contrastive_loss(zz, targets, 0.2)[0]

    _, grad = contrastive_loss(z, targets, 0.2)
    fd = fd_vector_grad(z.copy(), f)
    assert rel_err(grad, fd) < 1e-4


def test_encode_zero_params_fallback_axis():
    him = HimEstimator(history_dim=12, cfg=HimConfig(latent_dim=4, trunk_widths=(8,)))
    for p in (him.trunk, him.v_head, him.z_head):
        for w in p.weights:
            w[:] = 0.0
        for b in p.biases:
            b[:] = 0.0
    out = him.encode(np.random.default_rng(3).normal(size=(3, 12)))
    assert np.all(out.v_hat == 0.0)
    np.testing.assert_array_equal(out.z, np.tile([1.0, 0, 0, 0], (3, 1)))


def test_encode_deterministic_and_unit_norm():
    him = HimEstimator(history_dim=24, cfg=HimConfig(latent_dim=6, trunk_widths=(16,)))
    h = np.random.default_rng(4).normal(size=(7, 24))
    a = him.encode(h)
    b = him.encode(h.copy())
    np.testing.assert_array_equal(a.z, b.z)
    np.testing.assert_array_equal(a.v_hat, b.v_hat)
    np.testing.assert_allclose(np.linalg.norm(a.z, axis=1), 1.0, atol=1e-6)


def test_encode_batch_consistency():
    him = HimEstimator(history_dim=10, cfg=HimConfig(latent_dim=4, trunk_widths=(12,)))
    h = np.random.default_rng(5).normal(size=(4, 10))
    batch = him.encode(h)
    for i in range(4):
        single = him.encode_single(h[i].reshape(5, 2))
        np.testing.assert_allclose(single.z, batch.z[i], atol=1e-12)
        np.testing.assert_allclose(single.v_hat, batch.v_hat[i], atol=1e-12)


def test_encode_permutation_invariance():
    him = HimEstimator(history_dim=10, cfg=HimConfig(latent_dim=4, trunk_widths=(12,)))
    h = np.random.default_rng(6).normal(size=(6, 10))
    perm = np.array([3, 0, 5, 1, 4, 2])
    a = him.encode(h)
    b = him.encode(h[perm])
    np.testing.assert_allclose(b.z, a.z[perm], atol=1e-12)


def test_encode_rejects_wrong_history_width():
    him = HimEstimator(history_dim=10)
    with pytest.raises(ValueError, match="history width"):
        him.encode(np.zeros((2, 11)))


def test_update_reduces_velocity_loss_on_learnable_task():
    rng = np.random.default_rng(7)
    him = HimEstimator(history_dim=8, cfg=HimConfig(latent_dim=4, trunk_widths=(32,), learning_rate=3e-3), rng=rng)
    w_true = rng.normal(size=(8, 3))
    first = last = None
    for step in range(300):
        h = rng.normal(size=(32, 8))
        h_next = h + 0.1 * rng.normal(size=(32, 8))
        v_true = h @ w_true
        v_loss, c_loss = him.update(h, h_next, v_true)
        if step == 0:
            first = v_loss
        last = v_loss
    assert last < 0.3 * first
