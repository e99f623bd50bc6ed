"""Shared test utilities: finite-difference oracles and small-net builders."""

import numpy as np

from gaitlab.nets import NetSpec, NetParams, init_params, GradTape


def fd_param_grads(params, loss_fn, h=1e-6):
    """Central finite differences of a scalar loss over every parameter."""
    tape = GradTape.zeros_like(params)
    work = params.copy()
    for arrs, grads in ((work.weights, tape.d_weights), (work.biases, tape.d_biases)):
        for arr, grad in zip(arrs, grads):
            flat = arr.ravel()
            gflat = grad.ravel()
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + h
                hi = loss_fn(work)
                flat[i] = orig - h
                lo = loss_fn(work)
                flat[i] = orig
                gflat[i] = (hi - lo) / (2.0 * h)
    return tape


def fd_vector_grad(x, loss_fn, h=1e-6):
    """Central finite differences over a flat ndarray argument."""
    x = np.asarray(x, dtype=np.float64)
    g = np.zeros_like(x)
    flat = x.ravel()
    gflat = g.ravel()
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + h
        hi = loss_fn(x)
        flat[i] = orig - h
        lo = loss_fn(x)
        flat[i] = orig
        gflat[i] = (hi - lo) / (2.0 * h)
    return g


def rel_err(got, want, floor=1e-8):
    got = np.asarray(got, dtype=np.float64)
    want = np.asarray(want, dtype=np.float64)
    denom = np.maximum(np.maximum(np.abs(got), np.abs(want)), floor)
    return float(np.max(np.abs(got - want) / denom))


def assert_tape_close(tape, want, tol, floor=1e-8):
    worst = 0.0
    for g, w in zip(tape.d_weights + tape.d_biases, want.d_weights + want.d_biases):
        worst = max(worst, rel_err(g, w, floor))
    assert worst <= tol, f"gradient mismatch: worst relative error {worst:.3e} > {tol:.1e}"


def small_net(widths, activation="tanh", output_activation="identity", seed=0, gain=1.0):
    spec = NetSpec(tuple(widths), activation, output_activation)
    rng = np.random.default_rng(seed)
    return init_params(spec, rng, gain=gain)
