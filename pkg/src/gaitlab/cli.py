"""Command-line entry point: train / eval / ablate / export-clips.

Every run writes its artifacts under runs/<run-id>/ (root overridable with
GAITLAB_RUNS or --run-root); failures exit nonzero with a single-line
machine-readable error on stderr.
"""

import argparse
import os
import sys

import numpy as np

from .config import ConfigError, load_config
from .runs import Manifest, new_run_dir


def _write_canonical_config(cfg, run_dir):
    path = os.path.join(run_dir, "config.cfg")
    with open(path, "w") as f:
        f.write(cfg.canonical_text())
    return path


def cmd_train(args):
    cfg = load_config(args.config, args.set or [])
    run_dir = new_run_dir(args.run_id or f"train-seed{args.seed}", args.run_root)
    manifest = Manifest(run_dir, cfg.hash(), args.seed)
    manifest.add_artifact("config", _write_canonical_config(cfg, run_dir))
    from .trainer import train

    rt = train(cfg, args.seed, run_dir, iterations=args.iterations, resume_from=args.resume)
    manifest.add_artifact("metrics", os.path.join(run_dir, "metrics.csv"))
    manifest.add_artifact("checkpoint_final", os.path.join(run_dir, "checkpoints", "ckpt_final.bin"))
    manifest.verify_artifacts()
    print(run_dir)
    return 0


def _runtime_from_checkpoint(checkpoint):
    """Rebuild a runtime from the canonical config next to a checkpoint."""
    from .nets import load_arrays
    from .trainer import TrainRuntime

    if not os.path.exists(checkpoint):
        raise FileNotFoundError(f"checkpoint not found: {checkpoint}")
    run_dir = os.path.dirname(os.path.dirname(os.path.abspath(checkpoint)))
    config_path = os.path.join(run_dir, "config.cfg")
    if not os.path.exists(config_path):
        raise FileNotFoundError(f"config not found next to checkpoint: {config_path}")
    cfg = load_config(config_path)
    _, meta = load_arrays(checkpoint)
    rt = TrainRuntime(cfg, seed=int(meta["seed"]))
    rt.load_checkpoint(checkpoint)
    return rt, run_dir


def cmd_eval(args):
    rt, run_dir = _runtime_from_checkpoint(args.checkpoint)
    out_dir = args.out or os.path.join(run_dir, "eval")
    os.makedirs(out_dir, exist_ok=True)
    if args.suite == "tracking":
        from .evalkit import policy_rollout_provider, save_tracking_report, tracking_sweep

        report = tracking_sweep(policy_rollout_provider(rt), episodes=args.episodes, seed=args.seed)
        path = os.path.join(out_dir, "tracking_report.csv")
        save_tracking_report(path, report)
        print(f"{path} mae={report.mae:.4f} out_range_mae={report.out_range_mae:.4f}")
    elif args.suite == "dtw":
        from .evalkit.anthropo import dtw_eval, save_dtw_results

        rows = dtw_eval(rt, episodes=args.episodes, seed=args.seed)
        path = os.path.join(out_dir, "dtw_results.csv")
        save_dtw_results(path, rows)
        print(path)
    elif args.suite == "style":
        from .evalkit import style_histogram

        metrics = os.path.join(run_dir, "metrics.csv")
        mean, std, bins = style_histogram(metrics, first_iter=args.first_iter)
        path = os.path.join(out_dir, "style_histogram.csv")
        with open(path, "w") as f:
            f.write(f"# mean={mean!r},std={std!r}\n")
            f.write("bin_lo,bin_hi,count\n")
            for i, c in enumerate(bins):
                f.write(f"{i / len(bins)!r},{(i + 1) / len(bins)!r},{int(c)}\n")
        print(f"{path} mean={mean:.4f} std={std:.4f}")
    return 0


def cmd_ablate(args):
    from .evalkit import ARM_PRESETS, ablation_table, check_orderings, save_ablation_table
    from .trainer import train

    arms = args.arms.split(",")
    for arm in arms:
        if arm not in ARM_PRESETS:
            raise ConfigError(f"unknown arm {arm!r}; choose from {sorted(ARM_PRESETS)}")
    root = new_run_dir(args.run_id or "ablate", args.run_root)
    run_metrics = {}
    base_hash = None
    for arm in arms:
        paths = []
        for seed in range(args.seeds):
            overrides = [f"{k}={v}" for k, v in ARM_PRESETS[arm].items()]
            cfg = load_config(args.config, list(args.set or []) + overrides)
            # arm parity: apart from the toggles the configs must be identical
            if base_hash is None:
                base_hash = cfg.hash_without_toggles()
            elif cfg.hash_without_toggles() != base_hash:
                raise ConfigError(f"arm {arm} config differs beyond the toggles")
            run_dir = os.path.join(root, f"{arm}-seed{seed}")
            os.makedirs(run_dir)
            manifest = Manifest(run_dir, cfg.hash(), seed)
            manifest.add_artifact("config", _write_canonical_config(cfg, run_dir))
            train(cfg, seed, run_dir, iterations=args.iterations)
            manifest.add_artifact("metrics", os.path.join(run_dir, "metrics.csv"))
            manifest.verify_artifacts()
            paths.append(os.path.join(run_dir, "metrics.csv"))
        run_metrics[arm] = paths
    rows, cells = ablation_table(run_metrics, window=args.window)
    table_path = os.path.join(root, "ablation_table.csv")
    save_ablation_table(table_path, rows, cells)
    for (hi, lo), ok, margin in check_orderings(
        rows, [(a, "amp") for a in arms if a != "amp" and "amp" in arms]
    ):
        print(f"ordering {hi} >= {lo}: {'pass' if ok else 'FAIL'} (margin {margin:+.3f})")
    print(table_path)
    return 0


def cmd_export_clips(args):
    from .config import build_morphology
    from .motion import default_clipset, generate_gait, save_clip, save_track

    cfg = load_config(args.config, args.set or [])
    os.makedirs(args.out, exist_ok=True)
    morph = build_morphology(cfg)
    clips = default_clipset(
        morph, dt=cfg["motion.clip_dt"], duration=cfg["motion.clip_duration"],
        walk_speeds=cfg["motion.walk_speeds"], run_speeds=cfg["motion.run_speeds"],
    )
    from .motion.gait import SOURCE_LEG_LENGTH

    scale = morph.leg_length / SOURCE_LEG_LENGTH
    for clip in clips:
        name = f"{clip.label}_{clip.nominal_speed:+.2f}".replace("+", "p").replace("-", "m").replace(".", "_")
        save_clip(os.path.join(args.out, f"{name}.csv"), clip)
        track = generate_gait(clip.label, clip.nominal_speed / scale,
                              cfg["motion.clip_duration"], cfg["motion.clip_dt"])
        save_track(os.path.join(args.out, f"{name}_keypoints.csv"), track)
    print(args.out)
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="gaitlab", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="run a training job")
    t.add_argument("--config", default=None, help="flat key-value config file")
    t.add_argument("--set", action="append", metavar="KEY=VALUE", help="config override")
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--iterations", type=int, default=None, help="override trainer.iterations")
    t.add_argument("--resume", default=None, help="checkpoint to resume from")
    t.add_argument("--run-root", default=None)
    t.add_argument("--run-id", default=None)
    t.set_defaults(fn=cmd_train)

    e = sub.add_parser("eval", help="evaluate a checkpoint")
    e.add_argument("--checkpoint", required=True)
    e.add_argument("--suite", required=True, choices=("dtw", "tracking", "style"))
    e.add_argument("--episodes", type=int, default=20)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--first-iter", type=int, default=None, help="style window start")
    e.add_argument("--out", default=None)
    e.set_defaults(fn=cmd_eval)

    a = sub.add_parser("ablate", help="train ablation arms and emit the comparison table")
    a.add_argument("--arms", default="amp,amp_him,ampw_him,ampw_him_plus")
    a.add_argument("--seeds", type=int, default=3)
    a.add_argument("--config", default=None)
    a.add_argument("--set", action="append", metavar="KEY=VALUE")
    a.add_argument("--iterations", type=int, default=None)
    a.add_argument("--window", type=int, default=500)
    a.add_argument("--run-root", default=None)
    a.add_argument("--run-id", default=None)
    a.set_defaults(fn=cmd_ablate)

    x = sub.add_parser("export-clips", help="write the reference clip set as CSV")
    x.add_argument("--out", required=True)
    x.add_argument("--config", default=None)
    x.add_argument("--set", action="append", metavar="KEY=VALUE")
    x.set_defaults(fn=cmd_export_clips)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, FileNotFoundError, ValueError, OSError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
