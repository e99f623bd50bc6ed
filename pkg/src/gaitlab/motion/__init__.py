from .ik import ik_two_link, fk_two_link, UnreachableTarget
from .clips import (
    KeypointTrack,
    MotionClip,
    ClipFormatError,
    save_clip,
    load_clip,
    save_track,
    load_track,
    CLIP_COLUMNS,
    KEYPOINT_COLUMNS,
)
from .gait import generate_gait, stance_flags, GAIT_ENVELOPES, SOURCE_LEG_LENGTH
from .retarget import retarget, RetargetError, RetargetReport, mirror_error
from .features import transition_features, feature_dim, TransitionDataset, TransitionPair
from .dataset import default_clipset, DEFAULT_WALK_SPEEDS, DEFAULT_RUN_SPEEDS
