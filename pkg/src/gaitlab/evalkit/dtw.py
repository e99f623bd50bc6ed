"""Dynamic time warping with Euclidean local cost and steps {(1,0),(0,1),(1,1)}."""

from dataclasses import dataclass

import numpy as np


@dataclass
class DTWResult:
    distance: float
    path: list  # [(i, j)] monotone, (0,0) .. (n-1, m-1)


def dtw_distance(seq_a, seq_b):
    """Minimal accumulated alignment cost plus one optimal path."""
    a = np.atleast_2d(np.asarray(seq_a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(seq_b, dtype=np.float64))
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("sequences must be (frames, dims)")
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise ValueError("empty sequence")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"per-frame dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    n, m = a.shape[0], b.shape[0]
    # pairwise Euclidean local costs
    cost = np.sqrt(np.maximum(
        (a * a).sum(1)[:, None] + (b * b).sum(1)[None, :] - 2.0 * (a @ b.T), 0.0
    ))
    acc = np.full((n, m), np.inf)
    acc[0, 0] = cost[0, 0]
    for i in range(1, n):
        acc[i, 0] = acc[i - 1, 0] + cost[i, 0]
    for j in range(1, m):
        acc[0, j] = acc[0, j - 1] + cost[0, j]
    for i in range(1, n):
        prev = acc[i - 1]
        row = acc[i]
        for j in range(1, m):
            row[j] = cost[i, j] + min(prev[j], prev[j - 1], row[j - 1])
    # backtrack one optimal path
    path = [(n - 1, m - 1)]
    i, j = n - 1, m - 1
    while (i, j) != (0, 0):
        if i == 0:
            j -= 1
        elif j == 0:
            i -= 1
        else:
            best = min(acc[i - 1, j - 1], acc[i - 1, j], acc[i, j - 1])
            if acc[i - 1, j - 1] == best:
                i, j = i - 1, j - 1
            elif acc[i - 1, j] == best:
                i -= 1
            else:
                j -= 1
        path.append((i, j))
    path.reverse()
    return DTWResult(float(acc[n - 1, m - 1]), path)
