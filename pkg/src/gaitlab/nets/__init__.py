from .mlp import (
    NetSpec,
    NetParams,
    GradTape,
    init_params,
    forward,
    backward,
    input_gradient,
    grad_norm_penalty,
    grad_norm_penalty_fd,
)
from .adam import AdamState, VectorAdam, adam_step
from .checkpoint import (
    CheckpointError,
    save_arrays,
    load_arrays,
    save_net,
    load_net,
    net_meta,
    spec_from_meta,
    params_from_arrays,
)

__all__ = [
    "NetSpec",
    "NetParams",
    "GradTape",
    "init_params",
    "forward",
    "backward",
    "input_gradient",
    "grad_norm_penalty",
    "grad_norm_penalty_fd",
    "AdamState",
    "VectorAdam",
    "adam_step",
    "CheckpointError",
    "save_arrays",
    "load_arrays",
    "save_net",
    "load_net",
    "net_meta",
    "spec_from_meta",
    "params_from_arrays",
]
