from .morphology import RobotMorphology, MorphologyError, JOINT_NAMES
from .rewards import (
    RewardParams,
    RewardBreakdown,
    compute_reward_terms,
    task_rewards,
    TERM_NAMES,
    DEFAULT_WEIGHTS,
)
from .env import (
    PlanarBipedEnv,
    SimConfig,
    SimState,
    ObservationFrame,
    RandomizationConfig,
    RandomizationDraw,
    obs_dim,
    hidden_dim,
)
