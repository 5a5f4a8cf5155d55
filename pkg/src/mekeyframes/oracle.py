"""Brute-force reference implementations.

Deliberately shares no search code with :mod:`mekeyframes.reselection`:
window bounds, distances and tie-breaking are all re-derived here with naive
loops so a defect in the fast path cannot hide behind a shared helper.
"""

from __future__ import annotations

import math

from .core import Annotation, FrameSequence, Reannotation, SearchConfig, validate_annotation
from .errors import EmptyCandidateSet


def _distance(x, y) -> float:
    # fsum of the squared differences is exactly rounded, independent of order
    d = (x.pixels - y.pixels).ravel().tolist()
    return math.sqrt(math.fsum(v * v for v in d))


def _radius(span: int, lam: float) -> int:
    r = int(round(span * lam, 9) // 1)
    return r if r > 0 else 0


def _better_rise(cand, best, onset, apex) -> bool:
    """True when ``cand`` should replace ``best``; both are (diff, o, a)."""
    if best is None:
        return True
    if cand[0] != best[0]:
        return cand[0] > best[0]
    dist_c = abs(cand[1] - onset) + abs(cand[2] - apex)
    dist_b = abs(best[1] - onset) + abs(best[2] - apex)
    if dist_c != dist_b:
        return dist_c < dist_b
    if cand[1] != best[1]:
        return cand[1] < best[1]
    return cand[2] < best[2]


def brute_force_reselect(seq: FrameSequence, ann: Annotation, cfg: SearchConfig) -> Reannotation:
    n = len(seq)
    validate_annotation(ann, n)
    onset, apex, offset = ann.onset, ann.apex, ann.offset

    r_rise = _radius(apex - onset, cfg.lambda_rise)
    best = None
    count = 0
    for o in range(n):
        if o < onset or o > onset + r_rise:
            continue
        for a in range(n):
            if a < apex - r_rise or a > apex + r_rise:
                continue
            if not (o < a or (o == onset and a == apex)):
                continue
            count += 1
            cand = (_distance(seq.frames[a], seq.frames[o]), o, a)
            if _better_rise(cand, best, onset, apex):
                best = cand
    if best is None:
        raise EmptyCandidateSet("oracle found no rise candidate")
    rise_diff, new_onset, new_apex = best

    r_fall = _radius(offset - apex, cfg.lambda_fall)
    fall_best = None
    fall_count = 0
    for c in range(n):
        if c < offset or c > offset + r_fall or c <= new_apex:
            continue
        fall_count += 1
        d = _distance(seq.frames[new_apex], seq.frames[c])
        if fall_best is None or d > fall_best[0] or (d == fall_best[0] and c < fall_best[1]):
            fall_best = (d, c)
    if fall_best is None:
        new_offset, fall_diff, degenerate = max(offset, new_apex), 0.0, True
    else:
        fall_diff, new_offset = fall_best
        degenerate = False

    return Reannotation(
        original=ann,
        reselected=Annotation(new_onset, new_apex, new_offset),
        rise_peak_diff=rise_diff,
        fall_peak_diff=fall_diff,
        rise_candidate_count=count,
        fall_candidate_count=fall_count,
        rise_radius=r_rise,
        fall_radius=r_fall,
        degenerate=degenerate,
    )


def global_argmax_pair(seq: FrameSequence):
    """Most different frame pair ``(i, j, diff)`` with i < j over the whole
    sequence; ties go to the smaller i, then the smaller j."""
    best = None
    n = len(seq)
    for i in range(n):
        for j in range(i + 1, n):
            d = _distance(seq.frames[i], seq.frames[j])
            if best is None or d > best[2]:
                best = (i, j, d)
    return best
