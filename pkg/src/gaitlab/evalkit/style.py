"""Style-reward distribution statistics from a training metrics CSV."""

import numpy as np

from ..metrics import read_metrics

BINS = 50


class StyleWindowError(ValueError):
    pass


def style_histogram(metrics_path, first_iter=None, last_iter=None):
    """Aggregate (mean, std, 50-bin histogram over [0,1]) across an iteration window.

    Per-iteration rows carry the rollout's mean/std and bin counts; windows pool
    them with equal per-iteration sample counts (every iteration logs the same
    rollout size).
    """
    data = read_metrics(metrics_path)
    for col in ("iter", "style_mean", "style_std", "style_hist_00"):
        if col not in data:
            raise StyleWindowError(f"{metrics_path}: missing column {col}")
    iters = np.asarray(data["iter"], dtype=np.float64)
    lo = -np.inf if first_iter is None else first_iter
    hi = np.inf if last_iter is None else last_iter
    mask = (iters >= lo) & (iters <= hi)
    if not np.any(mask):
        raise StyleWindowError(f"no metrics rows in iteration window [{lo}, {hi}]")
    means = np.asarray(data["style_mean"], dtype=np.float64)[mask]
    stds = np.asarray(data["style_std"], dtype=np.float64)[mask]
    if np.any(np.isnan(means)):
        raise StyleWindowError("style columns contain NaN rows (style reward disabled?)")
    bins = np.zeros(BINS)
    for i in range(BINS):
        bins += np.asarray(data[f"style_hist_{i:02d}"], dtype=np.float64)[mask]
    # pooled moments over equally-sized iteration samples
    mean = float(means.mean())
    var = float(np.mean(stds**2 + means**2) - mean**2)
    return mean, float(np.sqrt(max(var, 0.0))), bins
