from .dtw import dtw_distance, DTWResult
from .tracking import (
    tracking_sweep,
    build_schedule,
    TrackingReport,
    save_tracking_report,
    policy_rollout_provider,
    DEFAULT_SEGMENTS,
    DEFAULT_SEGMENT_S,
    CLIP_SPEED_RANGE,
)
from .style import style_histogram, StyleWindowError
from .ablation import (
    ARM_PRESETS,
    ablation_table,
    windowed_return,
    save_ablation_table,
    check_orderings,
    ArmResult,
    DEFAULT_WINDOW,
)
