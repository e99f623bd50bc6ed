"""Minimal fully-connected network substrate with explicit forward/backward passes.

Everything trains in float64 so finite-difference gradient checks are meaningful;
a float32 cast is available for fast inference.  Supported layers: affine with
tanh / elu hidden activations and identity / tanh output activation.  The
second-order pass needed by gradient-norm penalties (forward-over-reverse) is
implemented for exactly this layer set.
"""

from dataclasses import dataclass, field

import numpy as np

HIDDEN_ACTIVATIONS = ("tanh", "elu")
OUTPUT_ACTIVATIONS = ("identity", "tanh")


@dataclass(frozen=True)
class NetSpec:
    """Layer widths include input and output: (in, h1, ..., out)."""

    layer_widths: tuple
    activation: str = "tanh"
    output_activation: str = "identity"

    def __post_init__(self):
        if len(self.layer_widths) < 2:
            raise ValueError("need at least input and output widths")
        if any(w <= 0 for w in self.layer_widths):
            raise ValueError(f"widths must be positive, got {self.layer_widths}")
        if self.activation not in HIDDEN_ACTIVATIONS:
            raise ValueError(f"unsupported activation {self.activation!r}")
        if self.output_activation not in OUTPUT_ACTIVATIONS:
            raise ValueError(f"unsupported output activation {self.output_activation!r}")

    @property
    def num_layers(self):
        return len(self.layer_widths) - 1

    @property
    def in_dim(self):
        return self.layer_widths[0]

    @property
    def out_dim(self):
        return self.layer_widths[-1]

    def activation_at(self, layer):
        return self.activation if layer < self.num_layers - 1 else self.output_activation


@dataclass
class NetParams:
    spec: NetSpec
    weights: list  # W_l with shape (fan_in, fan_out)
    biases: list  # b_l with shape (fan_out,)

    def copy(self):
        return NetParams(self.spec, [w.copy() for w in self.weights], [b.copy() for b in self.biases])

    def astype(self, dtype):
        return NetParams(
            self.spec,
            [w.astype(dtype) for w in self.weights],
            [b.astype(dtype) for b in self.biases],
        )

    def flat_arrays(self):
        out = []
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            out.append((f"w{i}", w))
            out.append((f"b{i}", b))
        return out

    def num_params(self):
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def all_finite(self):
        return all(np.isfinite(a).all() for a in self.weights + self.biases)


@dataclass
class GradTape:
    """Per-parameter gradients, shape-congruent with a NetParams; input grads on demand."""

    d_weights: list
    d_biases: list
    d_input: np.ndarray = None

    @staticmethod
    def zeros_like(params):
        return GradTape(
            [np.zeros_like(w) for w in params.weights],
            [np.zeros_like(b) for b in params.biases],
        )

    def add_(self, other, scale=1.0):
        for dw, ow in zip(self.d_weights, other.d_weights):
            dw += scale * ow
        for db, ob in zip(self.d_biases, other.d_biases):
            db += scale * ob
        return self

    def scale_(self, c):
        for dw in self.d_weights:
            dw *= c
        for db in self.d_biases:
            db *= c
        return self

    def grad_norm(self):
        total = 0.0
        for dw in self.d_weights:
            total += float(np.sum(dw * dw))
        for db in self.d_biases:
            total += float(np.sum(db * db))
        return np.sqrt(total)

    def clip_norm_(self, max_norm):
        norm = self.grad_norm()
        if norm > max_norm and norm > 0.0:
            self.scale_(max_norm / norm)
        return self

    def all_finite(self):
        return all(np.isfinite(g).all() for g in self.d_weights + self.d_biases)


def init_params(spec, rng, gain=1.0, final_gain=None, dtype=np.float64):
    """Scaled-normal init, std = gain / sqrt(fan_in); final layer may use its own gain."""
    weights, biases = [], []
    for i in range(spec.num_layers):
        fan_in = spec.layer_widths[i]
        fan_out = spec.layer_widths[i + 1]
        g = gain
        if final_gain is not None and i == spec.num_layers - 1:
            g = final_gain
        weights.append(rng.standard_normal((fan_in, fan_out)).astype(dtype) * (g / np.sqrt(fan_in)))
        biases.append(np.zeros(fan_out, dtype=dtype))
    return NetParams(spec, weights, biases)


def _act(name, z):
    if name == "tanh":
        return np.tanh(z)
    if name == "elu":
        out = z.copy()
        neg = z < 0.0
        out[neg] = np.expm1(z[neg])
        return out
    return z


def _act_prime(name, z, a):
    # a = act(z), reused where cheaper
    if name == "tanh":
        return 1.0 - a * a
    if name == "elu":
        out = np.ones_like(z)
        neg = z < 0.0
        out[neg] = a[neg] + 1.0  # d/dz (e^z - 1) = e^z = a + 1
        return out
    return np.ones_like(z)

def _act_second(name, z, a):
    if name == "tanh":
        return -2.0 * a * (1.0 - a * a)
    if name == "elu":
        return np.where(z > 0.0, 0.0, a + 1.0)
    return np.zeros_like(z)


def _check_input(params, x):
    if x.ndim != 2:
        raise ValueError(f"expected 2-D batch input, got shape {x.shape}")
    if x.shape[1] != params.spec.in_dim:
        raise ValueError(f"input width {x.shape[1]} != spec input width {params.spec.in_dim}")
    if not np.isfinite(x).all():
        raise ValueError("non-finite input")


def forward(params, x, check=True):
    """Batch forward pass.  Returns (output, cache); cache feeds backward()."""
    if check:
        _check_input(params, x)
    spec = params.spec
    inputs = [x]  # x_{l-1} per layer
    pre = []  # z_l per layer
    post = []  # act(z_l) per layer
    a = x
    for l in range(spec.num_layers):
        z = a @ params.weights[l] + params.biases[l]
        a = _act(spec.activation_at(l), z)
        inputs.append(a)
        pre.append(z)
        post.append(a)
    cache = (inputs[:-1], pre, post)
    return a, cache


def backward(params, cache, grad_out):
    """Reverse pass: parameter gradients plus input gradient of sum(grad_out * output)."""
    spec = params.spec
    inputs, pre, post = cache
    if grad_out.shape != post[-1].shape:
        raise ValueError(f"grad_out shape {grad_out.shape} != output shape {post[-1].shape}")
    tape = GradTape([None] * spec.num_layers, [None] * spec.num_layers)
    g = grad_out
    for l in range(spec.num_layers - 1, -1, -1):
        gz = g * _act_prime(spec.activation_at(l), pre[l], post[l])
        tape.d_weights[l] = inputs[l].T @ gz
        tape.d_biases[l] = gz.sum(axis=0)
        g = gz @ params.weights[l].T
    tape.d_input = g
    return tape


def input_gradient(params, x):
    """Gradient of the scalar output w.r.t. each input row; x shape (B, in) -> (B, in)."""
    if params.spec.out_dim != 1:
        raise ValueError(f"input_gradient needs a scalar-output net, got out_dim {params.spec.out_dim}")
    y, cache = forward(params, x)
    tape = backward(params, cache, np.ones_like(y))
    return tape.d_input


def grad_norm_penalty(params, x, p):
    """mean_j ||grad_x D(x_j)||^p and its parameter gradients (forward-over-reverse).

    The parameter gradient of the input-gradient norm needs second derivatives of
    the activations; exact for the supported layer set.  Returns
    (penalty_scalar, per_sample_norms, GradTape).
    """
    if params.spec.out_dim != 1:
        raise ValueError("grad_norm_penalty needs a scalar-output net")
    spec = params.spec
    n = x.shape[0]
    y, cache = forward(params, x)
    inputs, pre, post = cache
    g = backward(params, cache, np.ones_like(y)).d_input  # (B, in)
    norms = np.sqrt(np.sum(g * g, axis=1))  # (B,)

    # d/dtheta ||g_j||^p = d/dtheta (u_j . g_j) with u_j = p ||g_j||^(p-2) g_j held fixed.
    # u . grad_x D is the forward-mode directional derivative of D along u, so one
    # tangent-augmented forward then a reverse pass over primal+tangent variables.
    coeff = np.zeros_like(norms)
    nonzero = norms > 0.0
    coeff[nonzero] = p * norms[nonzero] ** (p - 2.0)
    u = coeff[:, None] * g

    acts = [spec.activation_at(l) for l in range(spec.num_layers)]
    primes = [_act_prime(acts[l], pre[l], post[l]) for l in range(spec.num_layers)]
    seconds = [_act_second(acts[l], pre[l], post[l]) for l in range(spec.num_layers)]

    # forward tangents: zdot_l = xdot_{l-1} @ W_l ; xdot_l = act'(z_l) * zdot_l
    xdots = [u]
    zdots = []
    xd = u
    for l in range(spec.num_layers):
        zd = xd @ params.weights[l]
        xd = primes[l] * zd
        zdots.append(zd)
        xdots.append(xd)

    # reverse over the combined graph; seed d(mean)/d(xdot_L) = 1/n per row
    tape = GradTape([None] * spec.num_layers, [None] * spec.num_layers)
    a_x = np.zeros_like(post[-1])
    a_xd = np.full_like(post[-1], 1.0 / n)
    for l in range(spec.num_layers - 1, -1, -1):
        a_z = a_x * primes[l] + a_xd * seconds[l] * zdots[l]
        a_zd = a_xd * primes[l]
        tape.d_weights[l] = inputs[l].T @ a_z + xdots[l].T @ a_zd
        tape.d_biases[l] = a_z.sum(axis=0)
        a_x = a_z @ params.weights[l].T
        a_xd = a_zd @ params.weights[l].T
    penalty = float(np.mean(norms**p))
    return penalty, norms, tape


def grad_norm_penalty_fd(params, x, p, h=1e-6):
    """Finite-difference fallback for the penalty parameter gradients (config escape hatch)."""

    def value(ps):
        g = input_gradient(ps, x)
        return float(np.mean(np.sum(g * g, axis=1) ** (p / 2.0)))

    tape = GradTape.zeros_like(params)
    work = params.copy()
    for arrs, grads in ((work.weights, tape.d_weights), (work.biases, tape.d_biases)):
        for arr, grad in zip(arrs, grads):
            flat = arr.ravel()
            gflat = grad.ravel()
            for i in range(flat.size):
                orig = flat[i]
                flat[i] = orig + h
                hi = value(work)
                flat[i] = orig - h
                lo = value(work)
                flat[i] = orig
                gflat[i] = (hi - lo) / (2.0 * h)
    penalty, norms, _ = grad_norm_penalty(params, x, p)
    return penalty, norms, tape
