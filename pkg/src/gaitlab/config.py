"""Flat key-value run configuration.

Files hold `section.key = value` lines ('#' comments allowed).  Unknown keys
are rejected, every value is type-checked and range-checked, overrides apply
after file values, and the canonical form (sorted keys, repr-formatted floats)
is what gets hashed and echoed into the run directory.
"""

import hashlib
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Field:
    kind: str  # float | int | bool | str | pair | floats
    default: object
    check: object = None  # callable(value) -> error string or None
    choices: tuple = None


def _positive(name):
    return lambda v: None if v > 0 else f"{name} must be positive"


def _non_negative(name):
    return lambda v: None if v >= 0 else f"{name} must be >= 0"


def _unit_interval(name):
    return lambda v: None if 0.0 <= v < 1.0 else f"{name} must lie in [0, 1)"


def _range_pair(name, lo_min=None):
    def check(v):
        lo, hi = v
        if lo > hi:
            return f"{name} range inverted: [{lo}, {hi}]"
        if lo_min is not None and lo < lo_min:
            return f"{name} lower bound must be >= {lo_min}"
        return None

    return check


SCHEMA = {
    # trainer
    "trainer.gamma": Field("float", 0.99, _unit_interval("trainer.gamma")),
    "trainer.lam": Field("float", 0.95, lambda v: None if 0.0 <= v <= 1.0 else "trainer.lam must lie in [0, 1]"),
    "trainer.clip_eps": Field("float", 0.2, _positive("trainer.clip_eps")),
    "trainer.epochs": Field("int", 4, _positive("trainer.epochs")),
    "trainer.minibatches": Field("int", 4, _positive("trainer.minibatches")),
    "trainer.num_envs": Field("int", 256, lambda v: None if v >= 1 else "trainer.num_envs must be >= 1"),
    "trainer.horizon": Field("int", 24, _positive("trainer.horizon")),
    "trainer.iterations": Field("int", 1000, _non_negative("trainer.iterations")),
    "trainer.learning_rate": Field("float", 3e-4, _positive("trainer.learning_rate")),
    "trainer.entropy_coef": Field("float", 5e-3, _non_negative("trainer.entropy_coef")),
    "trainer.value_coef": Field("float", 1.0, _positive("trainer.value_coef")),
    "trainer.style_weight": Field("float", 1.0, _non_negative("trainer.style_weight")),
    "trainer.init_log_std": Field("float", -1.0),
    "trainer.checkpoint_every": Field("int", 200, _positive("trainer.checkpoint_every")),
    "trainer.use_him": Field("bool", True),
    "trainer.use_curiosity": Field("bool", False),
    "trainer.use_style": Field("bool", True),
    "trainer.criterion": Field("str", "lsgan", choices=("lsgan", "wgan_div")),
    "trainer.policy_hidden": Field("floats", (256.0, 256.0, 256.0)),
    "trainer.value_hidden": Field("floats", (256.0, 256.0, 256.0)),
    "trainer.env": Field("str", "biped", choices=("biped", "pointmass")),
    "trainer.him_update_rows": Field("int", 256, _positive("trainer.him_update_rows")),
    # him
    "him.latent_dim": Field("int", 16, _positive("him.latent_dim")),
    "him.temperature": Field("float", 0.1, _positive("him.temperature")),
    "him.trunk_hidden": Field("floats", (128.0, 128.0)),
    "him.learning_rate": Field("float", 1e-3, _positive("him.learning_rate")),
    "him.velocity_weight": Field("float", 1.0, _non_negative("him.velocity_weight")),
    "him.contrastive_weight": Field("float", 1.0, _non_negative("him.contrastive_weight")),
    # adversary
    "adversary.wgan_k": Field("float", 2.0, _non_negative("adversary.wgan_k")),
    "adversary.wgan_p": Field("float", 6.0, lambda v: None if v >= 1.0 else "adversary.wgan_p must be >= 1"),
    "adversary.hidden": Field("floats", (128.0, 128.0)),
    "adversary.learning_rate": Field("float", 1e-3, _positive("adversary.learning_rate")),
    "adversary.updates_per_iteration": Field("int", 2, _non_negative("adversary.updates_per_iteration")),
    "adversary.grad_clip_norm": Field("float", 10.0, _positive("adversary.grad_clip_norm")),
    "adversary.batch_size": Field("int", 256, _positive("adversary.batch_size")),
    "adversary.penalty_finite_difference": Field("bool", False),
    # curiosity
    "curiosity.code_bits": Field("int", 32, _positive("curiosity.code_bits")),
    "curiosity.warmup": Field("int", 10_000, _positive("curiosity.warmup")),
    # sim / morphology
    "sim.torso_mass": Field("float", 6.0, _positive("sim.torso_mass")),
    "sim.torso_length": Field("float", 0.24, _positive("sim.torso_length")),
    "sim.thigh_length": Field("float", 0.25, _positive("sim.thigh_length")),
    "sim.shank_length": Field("float", 0.25, _positive("sim.shank_length")),
    "sim.thigh_mass": Field("float", 1.2, _positive("sim.thigh_mass")),
    "sim.shank_mass": Field("float", 0.8, _positive("sim.shank_mass")),
    "sim.pd_kp": Field("float", 40.0, _positive("sim.pd_kp")),
    "sim.pd_kd": Field("float", 1.0, _non_negative("sim.pd_kd")),
    "sim.torque_limit": Field("float", 30.0, _positive("sim.torque_limit")),
    "sim.physics_dt": Field("float", 0.001, _positive("sim.physics_dt")),
    "sim.decimation": Field("int", 20, _positive("sim.decimation")),
    "sim.gravity": Field("float", 9.81, _non_negative("sim.gravity")),
    "sim.contact_stiffness": Field("float", 2.0e4, _positive("sim.contact_stiffness")),
    "sim.contact_damping": Field("float", 200.0, _non_negative("sim.contact_damping")),
    "sim.tangential_damping": Field("float", 400.0, _non_negative("sim.tangential_damping")),
    "sim.episode_length_s": Field("float", 20.0, _positive("sim.episode_length_s")),
    "sim.fall_height": Field("float", 0.3),
    "sim.fall_pitch": Field("float", 1.0, _positive("sim.fall_pitch")),
    "sim.push_interval_s": Field("float", 4.0, _positive("sim.push_interval_s")),
    "sim.pushes_enabled": Field("bool", True),
    "sim.cmd_vx_range": Field("pair", (-0.6, 1.0), _range_pair("sim.cmd_vx_range")),
    "sim.history_length": Field("int", 6, _positive("sim.history_length")),
    "sim.reset_pose_noise": Field("float", 0.01, _non_negative("sim.reset_pose_noise")),
    "sim.reset_pitch_noise": Field("float", 0.01, _non_negative("sim.reset_pitch_noise")),
    "sim.bump_amplitude": Field("float", 0.0, lambda v: None if 0.0 <= v <= 0.03 else "sim.bump_amplitude must lie in [0, 0.03]"),
    "sim.bump_wavelength": Field("float", 1.0, _positive("sim.bump_wavelength")),
    "sim.obs_noise_scale": Field("float", 1.0, _non_negative("sim.obs_noise_scale")),
    # domain randomization ranges
    "rand.base_mass_delta_frac": Field("float", 0.22, _non_negative("rand.base_mass_delta_frac")),
    "rand.com_shift": Field("pair", (-0.02, 0.02), _range_pair("rand.com_shift")),
    "rand.friction": Field("pair", (0.1, 2.0), _range_pair("rand.friction", lo_min=0.0)),
    "rand.kp_factor": Field("pair", (0.8, 1.2), _range_pair("rand.kp_factor", lo_min=0.0)),
    "rand.kd_factor": Field("pair", (0.8, 1.2), _range_pair("rand.kd_factor", lo_min=0.0)),
    "rand.push_lin": Field("pair", (-0.6, 0.6), _range_pair("rand.push_lin")),
    "rand.push_ang": Field("pair", (-0.6, 0.6), _range_pair("rand.push_ang")),
    "rand.motor_strength": Field("pair", (0.8, 1.2), _range_pair("rand.motor_strength", lo_min=0.0)),
    "rand.delay_ms": Field("pair", (0.0, 60.0), _range_pair("rand.delay_ms", lo_min=0.0)),
    # reference motion
    "motion.clip_dt": Field("float", 0.02, _positive("motion.clip_dt")),
    "motion.clip_duration": Field("float", 8.0, _positive("motion.clip_duration")),
    "motion.walk_speeds": Field("floats", (-0.4, -0.2, 0.2, 0.4)),
    "motion.run_speeds": Field("floats", (0.8, 1.0)),
}

# the ablation arms may differ in exactly these keys
TOGGLE_KEYS = ("trainer.use_him", "trainer.criterion", "trainer.use_curiosity")


def _parse_value(key, fld, raw):
    raw = raw.strip()
    try:
        if fld.kind == "float":
            return float(raw)
        if fld.kind == "int":
            v = float(raw)
            if v != int(v):
                raise ConfigError(f"{key}: expected integer, got {raw!r}")
            return int(v)
        if fld.kind == "bool":
            if raw.lower() in ("true", "1", "yes", "on"):
                return True
            if raw.lower() in ("false", "0", "no", "off"):
                return False
            raise ConfigError(f"{key}: expected boolean, got {raw!r}")
        if fld.kind == "str":
            return raw
        if fld.kind == "pair":
            parts = raw.replace(",", " ").split()
            if len(parts) != 2:
                raise ConfigError(f"{key}: expected two numbers, got {raw!r}")
            return (float(parts[0]), float(parts[1]))
        if fld.kind == "floats":
            parts = raw.replace(",", " ").split()
            if not parts:
                raise ConfigError(f"{key}: expected at least one number")
            return tuple(float(p) for p in parts)
    except ConfigError:
        raise
    except ValueError as e:
        raise ConfigError(f"{key}: {e}") from e
    raise ConfigError(f"{key}: unknown field kind {fld.kind}")


def _format_value(fld, value):
    if fld.kind == "float":
        return repr(float(value))
    if fld.kind == "int":
        return str(int(value))
    if fld.kind == "bool":
        return "true" if value else "false"
    if fld.kind == "str":
        return str(value)
    if fld.kind in ("pair", "floats"):
        return " ".join(repr(float(v)) for v in value)
    raise ConfigError(f"unknown field kind {fld.kind}")


class Config:
    """Validated key->value mapping over the schema."""

    def __init__(self, values=None):
        self.values = dict(values or {})
        for key in self.values:
            if key not in SCHEMA:
                raise ConfigError(f"unknown config key {key!r}")
        self.validate()

    def __getitem__(self, key):
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        return self.values.get(key, SCHEMA[key].default)

    def set(self, key, raw_value):
        if key not in SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
        self.values[key] = _parse_value(key, SCHEMA[key], raw_value)
        self.validate_key(key)

    def validate_key(self, key):
        fld = SCHEMA[key]
        v = self[key]
        if fld.choices is not None and v not in fld.choices:
            raise ConfigError(f"{key}: must be one of {fld.choices}, got {v!r}")
        if fld.check is not None:
            err = fld.check(v)
            if err:
                raise ConfigError(err)

    def validate(self):
        for key in SCHEMA:
            self.validate_key(key)

    def canonical_text(self):
        lines = [f"{key} = {_format_value(SCHEMA[key], self[key])}" for key in sorted(SCHEMA)]
        return "\n".join(lines) + "\n"

    def hash(self):
        return hashlib.sha256(self.canonical_text().encode("utf-8")).hexdigest()

    def hash_without_toggles(self):
        lines = [
            f"{key} = {_format_value(SCHEMA[key], self[key])}"
            for key in sorted(SCHEMA)
            if key not in TOGGLE_KEYS
        ]
        return hashlib.sha256("\n".join(lines).encode("utf-8")).hexdigest()

    def copy(self):
        return Config(dict(self.values))


def parse_config_text(text, source="<config>"):
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}: line {lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"{source}: line {lineno}: unknown config key {key!r}")
        values[key] = _parse_value(key, SCHEMA[key], raw)
    return values


def load_config(path=None, overrides=()):
    """Read a config file (or defaults when None), then apply key=value overrides."""
    if path is None:
        cfg = Config()
    else:
        with open(path) as f:
            cfg = Config(parse_config_text(f.read(), source=str(path)))
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        cfg.set(key.strip(), raw)
    cfg.validate()
    return cfg


def build_morphology(cfg):
    from .sim import RobotMorphology

    n = 4
    return RobotMorphology(
        torso_mass=cfg["sim.torso_mass"],
        torso_length=cfg["sim.torso_length"],
        thigh_length=cfg["sim.thigh_length"],
        shank_length=cfg["sim.shank_length"],
        thigh_mass=cfg["sim.thigh_mass"],
        shank_mass=cfg["sim.shank_mass"],
        pd_kp=np.full(n, cfg["sim.pd_kp"]),
        pd_kd=np.full(n, cfg["sim.pd_kd"]),
        torque_limit=np.full(n, cfg["sim.torque_limit"]),
    )


def build_sim_config(cfg):
    from .sim import SimConfig

    return SimConfig(
        physics_dt=cfg["sim.physics_dt"],
        decimation=cfg["sim.decimation"],
        gravity=cfg["sim.gravity"],
        contact_stiffness=cfg["sim.contact_stiffness"],
        contact_damping=cfg["sim.contact_damping"],
        tangential_damping=cfg["sim.tangential_damping"],
        episode_length_s=cfg["sim.episode_length_s"],
        fall_height=cfg["sim.fall_height"],
        fall_pitch=cfg["sim.fall_pitch"],
        push_interval_s=cfg["sim.push_interval_s"],
        pushes_enabled=cfg["sim.pushes_enabled"],
        cmd_vx_range=cfg["sim.cmd_vx_range"],
        history_length=cfg["sim.history_length"],
        reset_pose_noise=cfg["sim.reset_pose_noise"],
        reset_pitch_noise=cfg["sim.reset_pitch_noise"],
        bump_amplitude=cfg["sim.bump_amplitude"],
        bump_wavelength=cfg["sim.bump_wavelength"],
        obs_noise_scale=cfg["sim.obs_noise_scale"],
    )


def build_randomization(cfg, morph):
    from .sim import RandomizationConfig

    d = cfg["rand.base_mass_delta_frac"] * morph.torso_mass
    rc = RandomizationConfig(
        base_mass_delta=(-d, d),
        com_shift=cfg["rand.com_shift"],
        friction=cfg["rand.friction"],
        kp_factor=cfg["rand.kp_factor"],
        kd_factor=cfg["rand.kd_factor"],
        push_lin=cfg["rand.push_lin"],
        push_ang=cfg["rand.push_ang"],
        motor_strength=cfg["rand.motor_strength"],
        delay_ms=cfg["rand.delay_ms"],
    )
    rc.validate()
    return rc


def build_him_config(cfg):
    from .him import HimConfig

    return HimConfig(
        latent_dim=cfg["him.latent_dim"],
        temperature=cfg["him.temperature"],
        trunk_widths=tuple(int(w) for w in cfg["him.trunk_hidden"]),
        velocity_weight=cfg["him.velocity_weight"],
        contrastive_weight=cfg["him.contrastive_weight"],
        learning_rate=cfg["him.learning_rate"],
    )


def build_adversary_config(cfg):
    from .adversary import AdversaryConfig

    return AdversaryConfig(
        criterion=cfg["trainer.criterion"],
        wgan_k=cfg["adversary.wgan_k"],
        wgan_p=cfg["adversary.wgan_p"],
        style_weight=cfg["trainer.style_weight"],
        hidden_widths=tuple(int(w) for w in cfg["adversary.hidden"]),
        learning_rate=cfg["adversary.learning_rate"],
        updates_per_iteration=cfg["adversary.updates_per_iteration"],
        grad_clip_norm=cfg["adversary.grad_clip_norm"],
        batch_size=cfg["adversary.batch_size"],
        penalty_finite_difference=cfg["adversary.penalty_finite_difference"],
    )
