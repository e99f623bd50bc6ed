"""Run directories and manifests.

Every run lives under the run root (env var GAITLAB_RUNS or ./runs), owns its
directory exclusively, and records a manifest sufficient to reproduce it:
config hash, seed, and the artifact paths the run produced.
"""

import json
import os
import time

from . import __version__

RUN_ROOT_ENV = "GAITLAB_RUNS"


def run_root(explicit=None):
    return explicit or os.environ.get(RUN_ROOT_ENV) or "runs"


def new_run_dir(name, root=None):
    root = run_root(root)
    os.makedirs(root, exist_ok=True)
    base = name
    path = os.path.join(root, base)
    k = 1
    while os.path.exists(path):
        k += 1
        path = os.path.join(root, f"{base}-{k}")
    os.makedirs(path)
    return path


class Manifest:
    def __init__(self, run_dir, config_hash, seed):
        self.run_dir = run_dir
        self.data = {
            "run_id": os.path.basename(run_dir),
            "config_hash": config_hash,
            "seed": int(seed),
            "start_time": time.strftime("%Y-%m-%dT%H:%M:%S"),
            "code_version": __version__,
            "artifacts": {},
        }

    def add_artifact(self, name, path):
        self.data["artifacts"][name] = os.path.relpath(path, self.run_dir)
        self.save()

    def save(self):
        with open(os.path.join(self.run_dir, "manifest.json"), "w") as f:
            json.dump(self.data, f, indent=2, sort_keys=True)

    def verify_artifacts(self):
        """All listed artifact paths must exist at run end."""
        missing = [
            name
            for name, rel in self.data["artifacts"].items()
            if not os.path.exists(os.path.join(self.run_dir, rel))
        ]
        if missing:
            raise FileNotFoundError(f"manifest artifacts missing: {missing}")


def load_manifest(run_dir):
    with open(os.path.join(run_dir, "manifest.json")) as f:
        return json.load(f)
