"""Count-based exploration: sign-hash continuous states, count visits, reward 1/sqrt(N).

The hash is a fixed random projection frozen at construction from the run seed;
features are whitened by running statistics that freeze after a warmup so the
code granularity cannot drift mid-run.  Counts persist across episodes.
"""

import threading
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class HashCode:
    bits: str

    def __post_init__(self):
        if any(c not in "01" for c in self.bits):
            raise ValueError(f"hash code must be a binary string, got {self.bits!r}")

    def __len__(self):
        return len(self.bits)


class CountTable:
    """Visit counts per hash code.  Increments are mutex-guarded so concurrent
    rollout workers can share one table; per-worker shard tables can instead be
    merged once per iteration (count conservation is what matters, see merge)."""

    def __init__(self, code_length):
        self.code_length = code_length
        self._counts = {}
        self._total = 0
        self._lock = threading.Lock()

    def observe_and_count(self, code):
        """Record one visit; returns the post-increment count."""
        bits = code.bits if isinstance(code, HashCode) else code
        if len(bits) != self.code_length:
            raise ValueError(f"code length {len(bits)} != table length {self.code_length}")
        with self._lock:
            n = self._counts.get(bits, 0) + 1
            self._counts[bits] = n
            self._total += 1
        return n

    def count(self, code):
        bits = code.bits if isinstance(code, HashCode) else code
        return self._counts.get(bits, 0)

    def merge(self, shard):
        """Fold a shard table into this one (per-iteration worker merge)."""
        if shard.code_length != self.code_length:
            raise ValueError("code length mismatch")
        with self._lock:
            for bits, n in shard._counts.items():
                self._counts[bits] = self._counts.get(bits, 0) + n
                self._total += n

    @property
    def total_observations(self):
        return self._total

    @property
    def distinct_codes(self):
        return len(self._counts)

    def state_arrays(self):
        """Codes (as uint8 bit matrix) and counts, in insertion order, for checkpoints."""
        codes = np.zeros((len(self._counts), self.code_length), dtype=np.uint8)
        counts = np.zeros(len(self._counts), dtype=np.int64)
        for i, (bits, n) in enumerate(self._counts.items()):
            codes[i] = [int(c) for c in bits]
            counts[i] = n
        return codes, counts

    @classmethod
    def from_state_arrays(cls, code_length, codes, counts):
        table = cls(code_length)
        for row, n in zip(codes, counts):
            bits = "".join("1" if b else "0" for b in row)
            table._counts[bits] = int(n)
            table._total += int(n)
        return table


def curiosity_reward(n):
    """Exactly 1/sqrt(N); counting must precede rewarding."""
    if n < 1:
        raise ValueError(f"visit count must be >= 1, got {n}")
    return 1.0 / np.sqrt(float(n))


class RunningWhitener:
    """Running mean/std that freezes after `warmup` observations."""

    def __init__(self, dim, warmup):
        self.dim = dim
        self.warmup = warmup
        self.count = 0
        self.mean = np.zeros(dim)
        self.m2 = np.zeros(dim)
        self.frozen = False

    def update(self, batch):
        if self.frozen:
            return
        for row in np.atleast_2d(batch):
            self.count += 1
            delta = row - self.mean
            self.mean += delta / self.count
            self.m2 += delta * (row - self.mean)
            if self.count >= self.warmup:
                self.frozen = True
                break

    @property
    def std(self):
        if self.count < 2:
            return np.ones(self.dim)
        s = np.sqrt(self.m2 / self.count)
        return np.where(s > 1e-8, s, 1.0)

    def whiten(self, batch):
        return (batch - self.mean) / self.std

    def state(self):
        return {
            "count": self.count,
            "frozen": self.frozen,
            "mean": self.mean.copy(),
            "m2": self.m2.copy(),
        }

    def load_state(self, st):
        self.count = int(st["count"])
        self.frozen = bool(st["frozen"])
        self.mean = np.asarray(st["mean"], dtype=np.float64).copy()
        self.m2 = np.asarray(st["m2"], dtype=np.float64).copy()


class StateHasher:
    """Maps feature vectors to fixed-length binary codes via a frozen sign projection."""

    def __init__(self, feature_dim, code_length=32, seed=0, warmup=10_000):
        self.feature_dim = feature_dim
        self.code_length = code_length
        rng = np.random.default_rng(seed)
        self.projection = rng.standard_normal((feature_dim, code_length))
        self.whitener = RunningWhitener(feature_dim, warmup)

    def hash_state(self, features):
        """Single feature vector -> HashCode."""
        return HashCode(self.hash_batch(np.asarray(features, dtype=np.float64)[None, :])[0])

    def hash_batch(self, features):
        """(B, feature_dim) -> list of bit strings."""
        features = np.asarray(features, dtype=np.float64)
        if features.shape[1] != self.feature_dim:
            raise ValueError(f"feature dim {features.shape[1]} != {self.feature_dim}")
        proj = self.whitener.whiten(features) @ self.projection
        bits = proj > 0.0
        return ["".join("1" if b else "0" for b in row) for row in bits]

    def update_whitener(self, features):
        self.whitener.update(features)
