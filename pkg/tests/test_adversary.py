import numpy as np
import pytest

from gaitlab.adversary import (
    AdversaryConfig,
    Discriminator,
    critic_score,
    lsgan_loss,
    wgan_div_loss,
    style_reward,
    pair_input,
)
from gaitlab.nets import NetSpec, NetParams, init_params, forward
from helpers import fd_param_grads, assert_tape_close, small_net


def test_config_defaults_and_validation():
    cfg = AdversaryConfig(criterion="wgan_div")
    assert cfg.reward_map == "bounded_sigmoid"
    assert AdversaryConfig(criterion="lsgan").reward_map == "lsgan_quadratic"
    with pytest.raises(ValueError):
        AdversaryConfig(criterion="hinge")
    with pytest.raises(ValueError):
        AdversaryConfig(wgan_k=-1.0)
    with pytest.raises(ValueError):
        AdversaryConfig(wgan_p=0.5)


def test_zero_weight_critic_scores_zero():
    params = small_net([6, 8, 1], seed=0)
    for w in params.weights:
        w[:] = 0.0
    s = critic_score(params, np.ones((4, 3)), np.ones((4, 3)))
    assert np.all(s == 0.0)


def test_batch_scoring_matches_per_pair():
    params = small_net([6, 8, 1], seed=1)
    rng = np.random.default_rng(2)
    a, b = rng.normal(size=(5, 3)), rng.normal(size=(5, 3))
    batch = critic_score(params, a, b)
    for i in range(5):
        np.testing.assert_allclose(critic_score(params, a[i], b[i])[0], batch[i], rtol=1e-12)


def test_identical_pair_identical_score():
    params = small_net([4, 6, 1], seed=3)
    a = np.array([0.1, -0.2])
    s1 = critic_score(params, a, a)
    s2 = critic_score(params, a.copy(), a.copy())
    assert s1[0] == s2[0]


def test_pair_input_rejects_mismatch():
    with pytest.raises(ValueError):
        pair_input(np.zeros(3), np.zeros(4))


def test_lsgan_perfect_discriminator_zero_loss():
    # identity critic on 1-d input: D(x) = x
    spec = NetSpec((1, 1))
    params = NetParams(spec, [np.array([[1.0]])], [np.zeros(1)])
    loss, _ = lsgan_loss(params, np.array([[1.0]]), np.array([[-1.0]]))
    assert loss == 0.0


def test_lsgan_zero_critic_loss_two():
    params = small_net([4, 6, 1], seed=4)
    for w in params.weights:
        w[:] = 0.0
    for b in params.biases:
        b[:] = 0.0
    loss, _ = lsgan_loss(params, np.ones((3, 4)), np.ones((5, 4)))
    assert loss == pytest.approx(2.0, abs=1e-15)


def test_lsgan_empty_batch_rejected():
    params = small_net([4, 6, 1])
    with pytest.raises(ValueError, match="empty"):
        lsgan_loss(params, np.zeros((0, 4)), np.ones((2, 4)))


def test_lsgan_gradients_match_fd():
    params = small_net([4, 8, 1], seed=5)
    rng = np.random.default_rng(6)
    real, fake = rng.normal(size=(6, 4)), rng.normal(size=(7, 4))

    def loss(ps):
        yr, _ = forward(ps, real)
        yf, _ = forward(ps, fake)
        return float(np.mean((yr - 1) ** 2) + np.mean((yf + 1) ** 2))

    _, tape = lsgan_loss(params, real, fake)
    assert_tape_close(tape, fd_param_grads(params, loss), 1e-4)


def test_wgan_zero_critic_zero_loss_at_k0():
    params = small_net([4, 6, 1], seed=7)
    for w in params.weights:
        w[:] = 0.0
    for b in params.biases:
        b[:] = 0.0
    loss, _ = wgan_div_loss(params, np.ones((3, 4)), np.ones((3, 4)), k=0.0, p=6.0,
                            rng=np.random.default_rng(0))
    assert loss == 0.0


def test_wgan_linear_critic_penalty_exact():
    spec = NetSpec((4, 1))
    params = init_params(spec, np.random.default_rng(8))
    rng = np.random.default_rng(9)
    real, fake = rng.normal(size=(5, 4)), rng.normal(size=(5, 4))
    k, p = 2.0, 6.0
    loss, _ = wgan_div_loss(params, real, fake, k, p, np.random.default_rng(1))
    w = params.weights[0][:, 0]
    expected = float(np.mean(fake @ w) - np.mean(real @ w) + k * np.linalg.norm(w) ** p)
    assert loss == pytest.approx(expected, rel=1e-12)


def test_wgan_penalty_positive_for_nonzero_gradient():
    params = small_net([4, 8, 1], seed=10)
    rng = np.random.default_rng(11)
    real, fake = rng.normal(size=(6, 4)), rng.normal(size=(6, 4))
    loss_k0, _ = wgan_div_loss(params, real, fake, 0.0, 6.0, np.random.default_rng(2))
    loss_k2, _ = wgan_div_loss(params, real, fake, 2.0, 6.0, np.random.default_rng(2))
    assert loss_k2 > loss_k0


def test_wgan_gradients_match_fd_through_penalty():
    params = small_net([3, 6, 6, 1], seed=12)
    rng_data = np.random.default_rng(13)
    real, fake = rng_data.normal(size=(4, 3)), rng_data.normal(size=(4, 3))
    k, p = 2.0, 6.0

    # freeze the interpolates so the finite-difference loss is a pure function of theta
    draws = np.random.default_rng(3)
    m = 4
    ri, fi = draws.permutation(4)[:m], draws.permutation(4)[:m]
    alpha = draws.uniform(0, 1, size=(m, 1))
    xhat = alpha * real[ri] + (1 - alpha) * fake[fi]

    def loss(ps):
        yr, _ = forward(ps, real)
        yf, _ = forward(ps, fake)
        from gaitlab.nets import input_gradient

        g = input_gradient(ps, xhat)
        pen = float(np.mean(np.sum(g * g, axis=1) ** (p / 2.0)))
        return float(np.mean(yf) - np.mean(yr) + k * pen)

    _, tape = wgan_div_loss(params, real, fake, k, p, np.random.default_rng(3))
    assert_tape_close(tape, fd_param_grads(params, loss), 1e-3, floor=1e-6)


def test_style_reward_lsgan_map():
    assert style_reward(1.0, "lsgan_quadratic") == 1.0
    assert style_reward(-1.0, "lsgan_quadratic") == 0.0
    assert style_reward(3.0, "lsgan_quadratic") == 0.0  # clamped past the peak width
    assert style_reward(0.0, "lsgan_quadratic") == pytest.approx(0.75)


def test_style_reward_sigmoid_map():
    assert style_reward(0.0, "bounded_sigmoid") == 0.5
    assert style_reward(50.0, "bounded_sigmoid") == pytest.approx(1.0)
    assert style_reward(-50.0, "bounded_sigmoid") == pytest.approx(0.0, abs=1e-12)


def test_style_reward_bounded_for_all_scores():
    scores = np.linspace(-1e3, 1e3, 2001)
    for m in ("lsgan_quadratic", "bounded_sigmoid"):
        r = style_reward(scores, m)
        assert np.all((r >= 0.0) & (r <= 1.0))


def test_style_reward_monotone_on_relevant_range():
    scores = np.linspace(-5.0, 1.0, 200)  # lsgan map peaks at +1
    r = style_reward(scores, "lsgan_quadratic")
    assert np.all(np.diff(r) >= 0.0)
    r = style_reward(np.linspace(-10, 10, 200), "bounded_sigmoid")
    assert np.all(np.diff(r) > 0.0)


def test_discriminator_update_improves_separation():
    rng = np.random.default_rng(14)
    for criterion in ("lsgan", "wgan_div"):
        cfg = AdversaryConfig(criterion=criterion, hidden_widths=(16, 16), learning_rate=3e-3)
        disc = Discriminator(feature_dim=3, cfg=cfg, rng=np.random.default_rng(15))
        real_t = rng.normal(size=(64, 3)) + 2.0
        fake_t = rng.normal(size=(64, 3)) - 2.0
        for _ in range(200):
            disc.update(real_t, real_t, fake_t, fake_t, rng)
        sep = disc.score(real_t, real_t).mean() - disc.score(fake_t, fake_t).mean()
        assert sep > 0.5, criterion
