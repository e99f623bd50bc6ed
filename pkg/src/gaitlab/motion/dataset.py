"""Default reference clip set: straight walking at low speeds plus forward runs."""

import numpy as np

from .gait import generate_gait
from .retarget import retarget

DEFAULT_WALK_SPEEDS = (-0.4, -0.2, 0.2, 0.4)
DEFAULT_RUN_SPEEDS = (0.8, 1.0)


def default_clipset(morph, dt=0.02, duration=8.0, walk_speeds=DEFAULT_WALK_SPEEDS, run_speeds=DEFAULT_RUN_SPEEDS):
    """Generate and retarget the bundled walk/run reference clips.

    Source gaits are generated at speed/scale so the retargeted clips travel at
    the listed robot-side speeds (uniform scaling scales speed with geometry).
    """
    from .gait import SOURCE_LEG_LENGTH

    scale = morph.leg_length / SOURCE_LEG_LENGTH
    clips = []
    for label, speeds in (("walk", walk_speeds), ("run", run_speeds)):
        for speed in speeds:
            clip, _ = retarget(generate_gait(label, speed / scale, duration, dt), morph)
            clips.append(clip)
    return clips
