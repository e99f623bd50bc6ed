"""Training runtime: wires the environment ensemble, reference dataset,
estimator, discriminator, policy/value nets, and curiosity table into the
iteration loop, and owns checkpointing and the metrics schema."""

import json
import os

import numpy as np

from ..adversary import Discriminator
from ..config import (
    build_adversary_config,
    build_him_config,
    build_morphology,
    build_randomization,
    build_sim_config,
)
from ..curiosity import CountTable, StateHasher
from ..him import HimEstimator
from ..metrics import MetricsWriter
from ..motion import TransitionDataset, default_clipset, feature_dim
from ..nets import load_arrays, params_from_arrays, save_arrays
from ..sim import PlanarBipedEnv, obs_dim as biped_obs_dim
from ..sim.pointmass import PointMassEnv
from .policy import GaussianPolicy, ValueFunction
from .ppo import discriminator_update, ppo_update
from .rollout import collect_rollouts

STYLE_BINS = 50


class TrainRuntime:
    def __init__(self, cfg, seed):
        self.cfg = cfg
        self.seed = int(seed)
        self.gamma = cfg["trainer.gamma"]
        self.lam = cfg["trainer.lam"]
        self.clip_eps = cfg["trainer.clip_eps"]
        self.epochs = cfg["trainer.epochs"]
        self.minibatches = cfg["trainer.minibatches"]
        self.horizon = cfg["trainer.horizon"]
        self.learning_rate = cfg["trainer.learning_rate"]
        self.entropy_coef = cfg["trainer.entropy_coef"]
        self.value_coef = cfg["trainer.value_coef"]
        self.style_weight = cfg["trainer.style_weight"]
        self.use_him = cfg["trainer.use_him"]
        self.use_curiosity = cfg["trainer.use_curiosity"]
        self.use_style = cfg["trainer.use_style"]
        self.him_update_rows = cfg["trainer.him_update_rows"]

        seq = np.random.SeedSequence(self.seed)
        env_seed, net_seed, trainer_seed, cur_seed = [s.generate_state(1)[0] for s in seq.spawn(4)]
        self.rng = np.random.default_rng(trainer_seed)
        net_rng = np.random.default_rng(net_seed)

        if cfg["trainer.env"] == "biped":
            morph = build_morphology(cfg)
            self.env = PlanarBipedEnv(
                morph=morph,
                sim_cfg=build_sim_config(cfg),
                rand_cfg=build_randomization(cfg, morph),
                num_envs=cfg["trainer.num_envs"],
                seed=int(env_seed),
            )
            clips = default_clipset(
                morph,
                dt=cfg["motion.clip_dt"],
                duration=cfg["motion.clip_duration"],
                walk_speeds=cfg["motion.walk_speeds"],
                run_speeds=cfg["motion.run_speeds"],
            )
            self.dataset = TransitionDataset(clips, expected_dt=self.env.cfg.control_dt) if self.use_style else None
            d = self.env.num_dof
            self.obs_scale = np.concatenate(
                [np.ones(3), np.full(3, 0.25), np.ones(2), np.ones(d), np.full(d, 0.05), np.ones(d)]
            )
            self.hidden_scale = np.concatenate(
                [np.ones(d), np.full(d, 0.05), np.ones(3), np.full(3, 0.25), np.ones(1)]
            )
            self.action_offset = morph.nominal_pose.copy()
            self.action_scale = 0.5
            self.feature_dim = feature_dim(d)
        else:
            self.env = PointMassEnv(num_envs=cfg["trainer.num_envs"], seed=int(env_seed),
                                    history_length=cfg["sim.history_length"])
            self.dataset = None
            self.obs_scale = np.ones(self.env.obs_dim)
            self.hidden_scale = np.ones(self.env.hidden_dim)
            self.action_offset = 0.0
            self.action_scale = 1.0
            self.feature_dim = 1

        self.history_dim = self.env.history.shape[1] * self.env.obs_dim
        self.term_names = ("feet_slip", "contact_forces", "lin_track", "ang_track",
                           "root_accel", "smoothness") if cfg["trainer.env"] == "biped" else ("lin_track",)

        self.him = HimEstimator(self.history_dim, build_him_config(cfg), rng=net_rng) if self.use_him else None
        him_extra = (3 + cfg["him.latent_dim"]) if self.use_him else 0
        self.policy_input_dim = self.env.obs_dim + him_extra
        self.critic_input_dim = self.env.obs_dim + self.env.hidden_dim

        self.policy = GaussianPolicy(
            self.policy_input_dim, self.env.action_dim,
            tuple(int(w) for w in cfg["trainer.policy_hidden"]),
            net_rng, init_log_std=cfg["trainer.init_log_std"],
        )
        self.value = ValueFunction(
            self.critic_input_dim, tuple(int(w) for w in cfg["trainer.value_hidden"]), net_rng
        )

        if self.dataset is not None:
            self.disc = Discriminator(self.feature_dim, build_adversary_config(cfg), rng=net_rng)
        else:
            self.disc = None

        if self.use_curiosity:
            cdim = self.env.curiosity_features().shape[1]
            self.curiosity = StateHasher(cdim, cfg["curiosity.code_bits"], seed=int(cur_seed),
                                         warmup=cfg["curiosity.warmup"])
            self.counts = CountTable(cfg["curiosity.code_bits"])
        else:
            self.curiosity = None
            self.counts = None

        self.iteration = 0
        self.total_steps = 0
        self.episode_task_return = np.zeros(self.env.num_envs)
        self.episode_length = np.zeros(self.env.num_envs, dtype=np.int64)

    # ------------------------------------------------------------------
    # input assembly
    # ------------------------------------------------------------------

    def assemble_policy_input(self, obs, hist):
        scaled = obs * self.obs_scale
        if self.him is None:
            return scaled
        out = self.him.encode(hist)
        return np.hstack([scaled, out.v_hat, out.z])

    def assemble_critic_input(self, obs, hidden):
        return np.hstack([obs * self.obs_scale, hidden * self.hidden_scale])

    def features_from_hidden(self, hidden):
        """Style features from a hidden-state matrix (same numbers as live features)."""
        from ..motion.features import transition_features

        d = self.env.action_dim
        return transition_features(
            hidden[:, 0:d], hidden[:, d : 2 * d], hidden[:, 2 * d + 6],
            hidden[:, [2 * d, 2 * d + 2]],
        )

    def make_eval_env(self, num_envs=1, seed=0):
        """Fresh environment with this runtime's configuration (for eval rollouts)."""
        cfg = self.cfg
        if cfg["trainer.env"] == "biped":
            morph = build_morphology(cfg)
            return PlanarBipedEnv(
                morph=morph, sim_cfg=build_sim_config(cfg),
                rand_cfg=build_randomization(cfg, morph), num_envs=num_envs, seed=seed,
            )
        return PointMassEnv(num_envs=num_envs, seed=seed, history_length=cfg["sim.history_length"])

    # ------------------------------------------------------------------
    # metrics schema
    # ------------------------------------------------------------------

    def metric_columns(self):
        cols = ["iter", "total_steps", "episodes_done", "mean_ep_task_return", "mean_ep_length",
                "mean_step_task_reward", "mean_total_reward"]
        cols += [f"raw_{name}" for name in self.term_names]
        cols += ["style_mean", "style_std"]
        cols += [f"style_hist_{i:02d}" for i in range(STYLE_BINS)]
        cols += ["curiosity_distinct", "curiosity_total", "curiosity_mean_rc",
                 "vel_mae", "vel_loss", "contrastive_loss",
                 "policy_loss", "value_loss", "entropy", "kl", "clip_frac", "disc_loss",
                 "policy_log_std_mean"]
        return cols

    def run_iteration(self):
        batch = collect_rollouts(self, self.horizon)
        stats, adv, targets = ppo_update(self, batch)
        disc_loss = discriminator_update(self, batch)
        self.iteration += 1
        self.total_steps += batch.horizon * batch.num_envs
        return self._metrics_row(batch, stats, disc_loss), batch

    def _metrics_row(self, batch, stats, disc_loss):
        use_style = self.disc is not None
        style = batch.style_rewards.ravel() if use_style else np.zeros(1)
        hist, _ = np.histogram(style, bins=STYLE_BINS, range=(0.0, 1.0))
        if self.him is not None:
            out = self.him.encode(batch.flat(batch.hist_t))
            vel_mae = float(np.mean(np.abs(out.v_hat - batch.flat(batch.v_true))))
        else:
            vel_mae = float("nan")
        row = {
            "iter": self.iteration,
            "total_steps": self.total_steps,
            "episodes_done": len(batch.episode_returns),
            "mean_ep_task_return": float(np.mean(batch.episode_returns)) if batch.episode_returns else float("nan"),
            "mean_ep_length": float(np.mean(batch.episode_lengths)) if batch.episode_lengths else float("nan"),
            "mean_step_task_reward": float(np.mean(batch.task_total)),
            "mean_total_reward": float(np.mean(batch.rewards)),
        }
        for name in self.term_names:
            row[f"raw_{name}"] = float(np.mean(batch.term_raw[name]))
        row["style_mean"] = float(np.mean(style)) if use_style else float("nan")
        row["style_std"] = float(np.std(style)) if use_style else float("nan")
        for i in range(STYLE_BINS):
            row[f"style_hist_{i:02d}"] = int(hist[i]) if use_style else 0
        row["curiosity_distinct"] = self.counts.distinct_codes if self.counts else 0
        row["curiosity_total"] = self.counts.total_observations if self.counts else 0
        row["curiosity_mean_rc"] = (
            float(np.mean(batch.curiosity_rewards)) if self.counts else float("nan")
        )
        row["vel_mae"] = vel_mae
        row["vel_loss"] = stats["vel_loss"]
        row["contrastive_loss"] = stats["contrastive_loss"]
        row["policy_loss"] = stats["policy_loss"]
        row["value_loss"] = stats["value_loss"]
        row["entropy"] = stats["entropy"]
        row["kl"] = stats["kl"]
        row["clip_frac"] = stats["clip_frac"]
        row["disc_loss"] = float(disc_loss)
        row["policy_log_std_mean"] = float(np.mean(self.policy.log_std))
        return row

    # ------------------------------------------------------------------
    # checkpointing
    # ------------------------------------------------------------------

    def _named_params(self):
        named = {"policy": self.policy.params, "value": self.value.params}
        if self.disc is not None:
            named["disc"] = self.disc.params
        if self.him is not None:
            named.update(self.him.param_sets())
        return named

    def save_checkpoint(self, path):
        arrays = []
        meta = {"iteration": self.iteration, "total_steps": self.total_steps,
                "config_hash": self.cfg.hash(), "seed": self.seed, "nets": {}}
        for name, params in self._named_params().items():
            from ..nets import net_meta

            meta["nets"][name] = net_meta(params.spec)
            for arr_name, arr in params.flat_arrays():
                arrays.append((f"{name}.{arr_name}", arr))
        arrays.append(("policy.log_std", self.policy.log_std))
        opt_states = {"policy": self.policy.opt, "value": self.value.opt}
        if self.disc is not None:
            opt_states["disc"] = self.disc.opt
        if self.him is not None:
            for hname, hstate in self.him.opt.items():
                opt_states[f"him_{hname}"] = hstate
        meta["opt_steps"] = {}
        for name, st in opt_states.items():
            arrays.extend(st.flat_arrays(f"opt.{name}"))
            meta["opt_steps"][name] = st.step_count
        arrays.append(("opt.log_std.m", self.policy.log_std_opt.m))
        arrays.append(("opt.log_std.v", self.policy.log_std_opt.v))
        meta["opt_steps"]["log_std"] = self.policy.log_std_opt.step_count

        env_arrays, env_meta = self.env.state_blob()
        arrays.extend(sorted(env_arrays.items()))
        meta.update(env_meta)
        meta["trainer.rng"] = self.rng.bit_generator.state
        arrays.append(("trainer.episode_task_return", self.episode_task_return))
        arrays.append(("trainer.episode_length", self.episode_length))

        if self.curiosity is not None:
            arrays.append(("curiosity.projection", self.curiosity.projection))
            wh = self.curiosity.whitener.state()
            arrays.append(("curiosity.mean", wh["mean"]))
            arrays.append(("curiosity.m2", wh["m2"]))
            meta["curiosity.count"] = wh["count"]
            meta["curiosity.frozen"] = wh["frozen"]
            codes, counts = self.counts.state_arrays()
            arrays.append(("curiosity.codes", codes))
            arrays.append(("curiosity.counts", counts))

        meta["rng_states_json"] = True
        save_arrays(path, arrays, meta)

    def load_checkpoint(self, path):
        arrays, meta = load_arrays(path)
        if meta["config_hash"] != self.cfg.hash():
            raise ValueError("checkpoint config hash differs from the active config")
        for name, params in self._named_params().items():
            loaded = params_from_arrays(params.spec, {
                k[len(name) + 1 :]: v for k, v in arrays.items() if k.startswith(f"{name}.")
            })
            params.weights = loaded.weights
            params.biases = loaded.biases
        self.policy.log_std = arrays["policy.log_std"].copy()

        opt_states = {"policy": self.policy.opt, "value": self.value.opt}
        if self.disc is not None:
            opt_states["disc"] = self.disc.opt
        if self.him is not None:
            for hname, hstate in self.him.opt.items():
                opt_states[f"him_{hname}"] = hstate
        for name, st in opt_states.items():
            for i in range(len(st.m_weights)):
                st.m_weights[i] = arrays[f"opt.{name}.mw{i}"].copy()
                st.m_biases[i] = arrays[f"opt.{name}.mb{i}"].copy()
                st.v_weights[i] = arrays[f"opt.{name}.vw{i}"].copy()
                st.v_biases[i] = arrays[f"opt.{name}.vb{i}"].copy()
            st.step_count = int(meta["opt_steps"][name])
        self.policy.log_std_opt.m = arrays["opt.log_std.m"].copy()
        self.policy.log_std_opt.v = arrays["opt.log_std.v"].copy()
        self.policy.log_std_opt.step_count = int(meta["opt_steps"]["log_std"])

        self.env.load_state_blob(arrays, meta)
        self.rng.bit_generator.state = meta["trainer.rng"]
        self.episode_task_return = arrays["trainer.episode_task_return"].copy()
        self.episode_length = arrays["trainer.episode_length"].copy()

        if self.curiosity is not None:
            self.curiosity.projection = arrays["curiosity.projection"].copy()
            self.curiosity.whitener.load_state({
                "count": meta["curiosity.count"], "frozen": meta["curiosity.frozen"],
                "mean": arrays["curiosity.mean"], "m2": arrays["curiosity.m2"],
            })
            self.counts = CountTable.from_state_arrays(
                self.counts.code_length, arrays["curiosity.codes"], arrays["curiosity.counts"]
            )
        self.iteration = int(meta["iteration"])
        self.total_steps = int(meta["total_steps"])


def train(cfg, seed, run_dir, iterations=None, resume_from=None, log=print):
    """Full training run: metrics CSV plus periodic checkpoints under run_dir.

    Returns the runtime.  Checkpoint write failures abort (partial metrics stay
    on disk, flushed row by row).
    """
    rt = TrainRuntime(cfg, seed)
    if resume_from:
        rt.load_checkpoint(resume_from)
    iterations = cfg["trainer.iterations"] if iterations is None else iterations
    ckpt_dir = os.path.join(run_dir, "checkpoints")
    os.makedirs(ckpt_dir, exist_ok=True)
    metrics_path = os.path.join(run_dir, "metrics.csv")
    every = cfg["trainer.checkpoint_every"]

    with MetricsWriter(metrics_path, rt.metric_columns()) as writer:
        rt.save_checkpoint(os.path.join(ckpt_dir, "ckpt_initial.bin"))
        target = rt.iteration + iterations
        while rt.iteration < target:
            row, _ = rt.run_iteration()
            writer.append(row)
            if rt.iteration % every == 0 or rt.iteration == target:
                rt.save_checkpoint(os.path.join(ckpt_dir, f"ckpt_{rt.iteration:06d}.bin"))
            if log and (rt.iteration % 50 == 0 or rt.iteration == target):
                log(
                    f"iter {rt.iteration}/{target} step_reward={row['mean_step_task_reward']:.4f} "
                    f"lin_track={row.get('raw_lin_track', float('nan')):.3f} "
                    f"ep_return={row['mean_ep_task_return']:.2f}"
                )
        rt.save_checkpoint(os.path.join(ckpt_dir, "ckpt_final.bin"))
    return rt
