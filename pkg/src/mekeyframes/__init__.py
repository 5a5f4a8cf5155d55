"""Micro-expression keyframe re-selection and annotation-deviation analysis."""

from .core import (
    Annotation,
    Frame,
    FrameSequence,
    Reannotation,
    SearchConfig,
    search_radius,
    validate_annotation,
)
from .deviation import DeviationRecord, SweepReport, deviation_record, lambda_sweep
from .diffing import difference_frame, frame_l2, motion_intensity_curve
from .oracle import brute_force_reselect, global_argmax_pair
from .reselection import reselect, reselect_fall, reselect_rise, rise_candidates

__version__ = "0.1.0"
