"""Windowed keyframe re-selection by pairwise L2 maximisation.

The rise search looks for the (onset, apex) pair with the largest frame
difference, with onset candidates taken forward from the annotated onset and
apex candidates symmetric around the annotated apex.  The fall search then
anchors on the new apex and scans forward from the annotated offset for the
frame that differs most from it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple

from .core import Annotation, FrameSequence, Reannotation, SearchConfig, validate_annotation
from .diffing import frame_l2
from .errors import EmptyCandidateSet, InvariantViolation


@dataclass(frozen=True)
class CandidatePair:
    onset_candidate: int
    apex_candidate: int
    diff: float = 0.0


def rise_candidates(ann: Annotation, r_rise: int, seq_len: int) -> List[Tuple[int, int]]:
    """Candidate (onset, apex) index pairs, ascending by onset then apex.

    The annotated pair is always present, even when onset == apex, so that a
    zero radius reproduces the annotation.
    """
    original = (ann.onset, ann.apex)
    o_hi = min(ann.onset + r_rise, seq_len - 1)
    a_lo = max(ann.apex - r_rise, 0)
    a_hi = min(ann.apex + r_rise, seq_len - 1)
    pairs = []
    for o in range(ann.onset, o_hi + 1):
        for a in range(a_lo, a_hi + 1):
            if o < a or (o, a) == original:
                pairs.append((o, a))
    return pairs


def fall_candidates(ann: Annotation, apex_new: int, r_fall: int, seq_len: int) -> List[int]:
    hi = min(ann.offset + r_fall, seq_len - 1)
    return [c for c in range(ann.offset, hi + 1) if c > apex_new]


def _rise_key(pair: CandidatePair, ann: Annotation):
    # larger diff first, then closest to the annotation, then smaller indices
    o, a = pair.onset_candidate, pair.apex_candidate
    return (-pair.diff, abs(o - ann.onset) + abs(a - ann.apex), o, a)


def reselect_rise(seq: FrameSequence, ann: Annotation, cfg: SearchConfig):
    """Return ``(onset, apex, peak_diff, candidate_count)`` for the rise phase."""
    validate_annotation(ann, len(seq))
    r = cfg.rise_radius(ann)
    pairs = rise_candidates(ann, r, len(seq))
    if not pairs:
        raise EmptyCandidateSet(f"no rise candidates for {ann}")
    scored = [CandidatePair(o, a, frame_l2(seq[a], seq[o])) for o, a in pairs]
    best = min(scored, key=lambda p: _rise_key(p, ann))
    return best.onset_candidate, best.apex_candidate, best.diff, len(pairs)


def reselect_fall(seq: FrameSequence, apex_new: int, ann: Annotation, cfg: SearchConfig):
    """Return ``(offset, peak_diff, candidate_count, degenerate)``.

    When no candidate lies after ``apex_new`` the offset falls back to
    ``max(offset, apex_new)`` and ``degenerate`` is True.
    """
    validate_annotation(ann, len(seq))
    if not 0 <= apex_new < len(seq):
        raise InvariantViolation(f"apex {apex_new} outside sequence of length {len(seq)}")
    r = cfg.fall_radius(ann)
    cands = fall_candidates(ann, apex_new, r, len(seq))
    if not cands:
        return max(ann.offset, apex_new), 0.0, 0, True
    anchor = seq[apex_new]
    # ties resolve to the earliest candidate, i.e. the one closest to the annotation
    best_c, best_d = cands[0], frame_l2(anchor, seq[cands[0]])
    for c in cands[1:]:
        d = frame_l2(anchor, seq[c])
        if d > best_d:
            best_c, best_d = c, d
    return best_c, best_d, len(cands), False


def reselect(seq: FrameSequence, ann: Annotation, cfg: SearchConfig) -> Reannotation:
    onset, apex, rise_diff, n_rise = reselect_rise(seq, ann, cfg)
    offset, fall_diff, n_fall, degenerate = reselect_fall(seq, apex, ann, cfg)
    new = Annotation(onset, apex, offset)
    validate_annotation(new, len(seq))
    if onset >= apex and (onset, apex) != (ann.onset, ann.apex):
        raise InvariantViolation(f"re-selected onset {onset} not before apex {apex}")
    return Reannotation(
        original=ann,
        reselected=new,
        rise_peak_diff=rise_diff,
        fall_peak_diff=fall_diff,
        rise_candidate_count=n_rise,
        fall_candidate_count=n_fall,
        rise_radius=cfg.rise_radius(ann),
        fall_radius=cfg.fall_radius(ann),
        degenerate=degenerate,
    )
