import numpy as np
import pytest

from gaitlab.nets import (
    NetSpec,
    NetParams,
    AdamState,
    init_params,
    forward,
    backward,
    input_gradient,
    grad_norm_penalty,
    grad_norm_penalty_fd,
    adam_step,
    save_net,
    load_net,
    save_arrays,
    load_arrays,
    CheckpointError,
)
from helpers import fd_param_grads, rel_err, assert_tape_close, small_net


def test_zero_net_outputs_zero():
    params = small_net([3, 4, 1])
    for w in params.weights:
        w[:] = 0.0
    y, _ = forward(params, np.random.default_rng(1).normal(size=(5, 3)))
    assert np.all(y == 0.0)


def test_single_affine_layer_exact():
    spec = NetSpec((3, 2))
    rng = np.random.default_rng(2)
    params = init_params(spec, rng)
    x = rng.normal(size=(4, 3))
    y, cache = forward(params, x)
    np.testing.assert_array_equal(y, x @ params.weights[0] + params.biases[0])
    g = rng.normal(size=(4, 2))
    tape = backward(params, cache, g)
    np.testing.assert_allclose(tape.d_input, g @ params.weights[0].T, rtol=0, atol=0)


def test_batch_matches_single_rows():
    params = small_net([5, 8, 8, 2], seed=3)
    rng = np.random.default_rng(4)
    x = rng.normal(size=(2, 5))
    y_batch, _ = forward(params, x)
    y0, _ = forward(params, x[:1])
    y1, _ = forward(params, x[1:])
    # BLAS kernels differ by batch shape, so agreement is to float tolerance,
    # not bit-exact (bit-exactness holds for identical shapes; see determinism test)
    np.testing.assert_allclose(y_batch, np.vstack([y0, y1]), rtol=1e-12, atol=1e-14)


def test_forward_rejects_bad_input():
    params = small_net([3, 2, 1])
    with pytest.raises(ValueError):
        forward(params, np.zeros((2, 4)))
    bad = np.zeros((2, 3))
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        forward(params, bad)


def test_backward_zero_grad_gives_zero_tape():
    params = small_net([3, 4, 2], seed=5)
    x = np.random.default_rng(6).normal(size=(3, 3))
    y, cache = forward(params, x)
    tape = backward(params, cache, np.zeros_like(y))
    for g in tape.d_weights + tape.d_biases:
        assert np.all(g == 0.0)
    assert np.all(tape.d_input == 0.0)


@pytest.mark.parametrize("activation", ["tanh", "elu"])
@pytest.mark.parametrize("output_activation", ["identity", "tanh"])
def test_param_grads_match_finite_differences(activation, output_activation):
    params = small_net([4, 6, 6, 2], activation, output_activation, seed=7)
    rng = np.random.default_rng(8)
    x = rng.normal(size=(5, 4))
    target = rng.normal(size=(5, 2))

    def loss(ps):
        y, _ = forward(ps, x)
        return float(np.mean((y - target) ** 2))

    y, cache = forward(params, x)
    tape = backward(params, cache, 2.0 * (y - target) / y.size)
    want = fd_param_grads(params, loss)
    assert_tape_close(tape, want, 1e-5)


def test_input_gradient_constant_net_is_zero():
    params = small_net([3, 4, 1], seed=9)
    for w in params.weights:
        w[:] = 0.0
    g = input_gradient(params, np.random.default_rng(10).normal(size=(4, 3)))
    assert np.all(g == 0.0)


def test_input_gradient_linear_net_is_weight_vector():
    spec = NetSpec((4, 1))
    params = init_params(spec, np.random.default_rng(11))
    x = np.random.default_rng(12).normal(size=(3, 4))
    g = input_gradient(params, x)
    for row in g:
        np.testing.assert_allclose(row, params.weights[0][:, 0], rtol=0, atol=0)


@pytest.mark.parametrize("activation", ["tanh", "elu"])
def test_input_gradient_matches_finite_differences(activation):
    params = small_net([4, 8, 8, 1], activation, seed=13)
    rng = np.random.default_rng(14)
    x = rng.normal(size=(1, 4))

    def out(v):
        y, _ = forward(params, v.reshape(1, -1))
        return float(y[0, 0])

    g = input_gradient(params, x)[0]
    h = 1e-6
    fd = np.zeros(4)
    for i in range(4):
        d = np.zeros(4)
        d[i] = h
        fd[i] = (out(x[0] + d) - out(x[0] - d)) / (2 * h)
    assert rel_err(g, fd) < 1e-5


def test_input_gradient_requires_scalar_output():
    params = small_net([3, 4, 2])
    with pytest.raises(ValueError):
        input_gradient(params, np.zeros((1, 3)))


def test_grad_norm_penalty_linear_critic_exact():
    # D(x) = w.x  ->  ||grad_x D||^p = ||w||^p independent of x
    spec = NetSpec((5, 1))
    params = init_params(spec, np.random.default_rng(15))
    x = np.random.default_rng(16).normal(size=(7, 5))
    for p in (1.0, 2.0, 6.0):
        penalty, norms, _ = grad_norm_penalty(params, x, p)
        w_norm = float(np.linalg.norm(params.weights[0][:, 0]))
        assert abs(penalty - w_norm**p) < 1e-12
        np.testing.assert_allclose(norms, w_norm, rtol=1e-12)


@pytest.mark.parametrize("activation", ["tanh", "elu"])
@pytest.mark.parametrize("p", [2.0, 6.0])
def test_grad_norm_penalty_grads_match_finite_differences(activation, p):
    params = small_net([3, 6, 6, 1], activation, seed=17)
    x = np.random.default_rng(18).normal(size=(4, 3))

    def loss(ps):
        g = input_gradient(ps, x)
        return float(np.mean(np.sum(g * g, axis=1) ** (p / 2.0)))

    _, _, tape = grad_norm_penalty(params, x, p)
    want = fd_param_grads(params, loss)
    assert_tape_close(tape, want, 1e-3, floor=1e-6)


def test_grad_norm_penalty_fd_fallback_agrees():
    params = small_net([3, 5, 1], seed=19)
    x = np.random.default_rng(20).normal(size=(3, 3))
    p_exact, _, tape_exact = grad_norm_penalty(params, x, 6.0)
    p_fd, _, tape_fd = grad_norm_penalty_fd(params, x, 6.0)
    assert p_exact == p_fd
    assert_tape_close(tape_fd, tape_exact, 1e-4, floor=1e-6)


def test_adam_zero_gradient_keeps_params():
    params = small_net([3, 4, 2], seed=21)
    before = params.copy()
    state = AdamState.for_params(params)
    tape = backward(params, forward(params, np.zeros((1, 3)))[1], np.zeros((1, 2)))
    assert adam_step(params, tape, state, lr=0.1)
    for w0, w1 in zip(before.weights, params.weights):
        np.testing.assert_array_equal(w0, w1)


def test_adam_rejects_nonfinite_gradient():
    params = small_net([2, 1], seed=22)
    before = params.copy()
    state = AdamState.for_params(params)
    y, cache = forward(params, np.ones((1, 2)))
    tape = backward(params, cache, np.ones((1, 1)))
    tape.d_weights[0][0, 0] = np.nan
    assert not adam_step(params, tape, state, lr=0.1)
    np.testing.assert_array_equal(before.weights[0], params.weights[0])
    assert state.step_count == 0


def test_adam_descends_on_square():
    # f(w) = w^2 at w=1: gradient 2w, one step must decrease w
    spec = NetSpec((1, 1))
    params = NetParams(spec, [np.array([[1.0]])], [np.array([0.0])])
    state = AdamState.for_params(params)
    tape = backward(params, forward(params, np.array([[1.0]]))[1], np.array([[2.0]]))
    adam_step(params, tape, state, lr=0.1)
    assert params.weights[0][0, 0] < 1.0


def test_adam_converges_on_quadratic():
    # 500 decayed-lr steps on f(w) = 0.5||w - w*||^2
    target = np.array([0.7, -0.3])
    spec = NetSpec((1, 2))
    params = NetParams(spec, [np.array([[0.3, 0.2]])], [np.zeros(2)])
    state = AdamState.for_params(params)
    from gaitlab.nets import GradTape

    for t in range(500):
        g = params.weights[0][0] - target
        tape = GradTape([g.reshape(1, 2).copy()], [np.zeros(2)])
        adam_step(params, tape, state, lr=0.1 * 0.99**t)
    assert np.linalg.norm(params.weights[0][0] - target) < 1e-3


def test_forward_deterministic_bits():
    params = small_net([6, 16, 16, 3], seed=23)
    x = np.random.default_rng(24).normal(size=(9, 6))
    y1, _ = forward(params, x)
    y2, _ = forward(params, x)
    assert np.array_equal(y1, y2)


def test_float32_inference_close_to_float64():
    params = small_net([5, 16, 2], seed=25)
    x = np.random.default_rng(26).normal(size=(4, 5))
    y64, _ = forward(params, x)
    p32 = params.astype(np.float32)
    y32, _ = forward(p32, x.astype(np.float32), check=False)
    assert y32.dtype == np.float32
    np.testing.assert_allclose(y32, y64, rtol=1e-5, atol=1e-5)


def test_checkpoint_roundtrip(tmp_path):
    params = small_net([4, 8, 2], activation="elu", output_activation="tanh", seed=27)
    path = tmp_path / "net.bin"
    save_net(path, params, extra_meta={"note": "test"})
    loaded, meta = load_net(path)
    assert meta["note"] == "test"
    assert loaded.spec == params.spec
    for a, b in zip(params.weights + params.biases, loaded.weights + loaded.biases):
        np.testing.assert_array_equal(a, b)


def test_checkpoint_rejects_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOTMAGIC" + b"\x00" * 32)
    with pytest.raises(CheckpointError):
        load_arrays(path)


def test_checkpoint_rejects_truncated(tmp_path):
    params = small_net([4, 8, 2], seed=28)
    path = tmp_path / "net.bin"
    save_net(path, params)
    data = path.read_bytes()
    path.write_bytes(data[: len(data) - 16])
    with pytest.raises(CheckpointError):
        load_net(path)


def test_checkpoint_shape_congruence(tmp_path):
    params = small_net([4, 8, 2], seed=29)
    path = tmp_path / "net.bin"
    # corrupt the declared widths so shapes no longer match the payload
    from gaitlab.nets import net_meta, params_from_arrays, spec_from_meta

    save_arrays(path, params.flat_arrays(), {"net": net_meta(params.spec)})
    arrays, meta = load_arrays(path)
    meta["net"]["layer_widths"] = [4, 9, 2]
    with pytest.raises(CheckpointError):
        params_from_arrays(spec_from_meta(meta["net"]), arrays)
