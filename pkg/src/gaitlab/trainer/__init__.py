from .policy import GaussianPolicy, ValueFunction
from .gae import compute_gae, normalize_advantages
from .rollout import RolloutBatch, collect_rollouts
from .ppo import ppo_update, discriminator_update
from .loop import TrainRuntime, train
