"""Mean-return ablation table across arm presets and seeds.

The table's numbers come from each run's metrics CSV, never from re-simulation:
windowed mean of per-episode task returns over the last `window` iterations.
"""

import os
import warnings
from dataclasses import dataclass

import numpy as np

from ..metrics import read_metrics

RETURN_COLUMN = "mean_ep_task_return"
DEFAULT_WINDOW = 500

# the paper's ablation arms as toggle combinations
ARM_PRESETS = {
    "amp": {"trainer.use_him": "false", "trainer.criterion": "lsgan", "trainer.use_curiosity": "false"},
    "amp_him": {"trainer.use_him": "true", "trainer.criterion": "lsgan", "trainer.use_curiosity": "false"},
    "ampw_him": {"trainer.use_him": "true", "trainer.criterion": "wgan_div", "trainer.use_curiosity": "false"},
    "ampw_him_plus": {"trainer.use_him": "true", "trainer.criterion": "wgan_div", "trainer.use_curiosity": "true"},
}


@dataclass
class ArmResult:
    arm: str
    seed: int
    mean_return: float
    std_return: float
    complete: bool


def windowed_return(metrics_path, window=DEFAULT_WINDOW):
    """Mean and std of the episode-return column over the last `window` iterations."""
    data = read_metrics(metrics_path)
    if RETURN_COLUMN not in data:
        raise ValueError(f"{metrics_path}: missing column {RETURN_COLUMN}")
    values = np.asarray(data[RETURN_COLUMN], dtype=np.float64)
    if len(values) < window:
        warnings.warn(
            f"{metrics_path}: run has {len(values)} iterations < window {window}; clamping"
        )
    tail = values[-window:]
    tail = tail[~np.isnan(tail)]
    if len(tail) == 0:
        return float("nan"), float("nan")
    return float(tail.mean()), float(tail.std())


def ablation_table(run_metrics, window=DEFAULT_WINDOW):
    """run_metrics: {arm: [metrics paths per seed]} -> per-arm rows + per-seed cells.

    Incomplete cells (missing/empty CSVs) are flagged but the table still emits.
    """
    cells = []
    rows = []
    for arm, paths in run_metrics.items():
        per_seed = []
        for seed_idx, path in enumerate(paths):
            try:
                mean, std = windowed_return(path, window)
                complete = not np.isnan(mean)
            except (OSError, ValueError):
                mean, std, complete = float("nan"), float("nan"), False
            cells.append(ArmResult(arm, seed_idx, mean, std, complete))
            if complete:
                per_seed.append(mean)
        if per_seed:
            rows.append((arm, float(np.median(per_seed)), float(np.std(per_seed)), len(per_seed)))
        else:
            rows.append((arm, float("nan"), float("nan"), 0))
    return rows, cells


def save_ablation_table(path, rows, cells):
    with open(path, "w") as f:
        f.write("arm,median_return,std_across_seeds,seeds_complete\n")
        for arm, med, std, n in rows:
            f.write(f"{arm},{med!r},{std!r},{n}\n")
        f.write("# per-seed cells\n")
        f.write("# arm,seed,mean_return,std_return,complete\n")
        for c in cells:
            f.write(f"# {c.arm},{c.seed},{c.mean_return!r},{c.std_return!r},{int(c.complete)}\n")


def check_orderings(rows, orderings):
    """orderings: [(better_arm, worse_arm)] -> list of (pair, ok, margin)."""
    table = {arm: med for arm, med, _, _ in rows}
    results = []
    for hi, lo in orderings:
        ok = bool(table[hi] >= table[lo]) if not (np.isnan(table[hi]) or np.isnan(table[lo])) else False
        results.append(((hi, lo), ok, float(table[hi] - table[lo])))
    return results
