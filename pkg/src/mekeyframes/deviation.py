"""Deviation between human annotations and re-selected keyframes, and the
lambda sweep that aggregates it per group."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .core import Annotation, FrameSequence, SearchConfig, validate_annotation
from .errors import InputError, InvalidFps, InvalidLambda, SampleError
from .reselection import reselect

KEYFRAMES = ("onset", "apex", "offset")
DEFAULT_SWEEP_LAMBDAS = (0.05, 0.10, 0.15, 0.20)


@dataclass(frozen=True)
class KeyframeDeviation:
    d_frames: int
    d_pct: float
    d_ms: float
    signed: int  # re - orig, for exports only


@dataclass(frozen=True)
class DeviationRecord:
    onset: KeyframeDeviation
    apex: KeyframeDeviation
    offset: KeyframeDeviation
    seq_len: int
    fps: float

    def entries(self) -> Tuple[KeyframeDeviation, ...]:
        return (self.onset, self.apex, self.offset)

    @property
    def mean_d_ms(self) -> float:
        return sum(e.d_ms for e in self.entries()) / 3

    @property
    def mean_d_pct(self) -> float:
        return sum(e.d_pct for e in self.entries()) / 3


def keyframe_deviation(orig: int, re: int, seq_len: int, fps: float) -> KeyframeDeviation:
    d = abs(re - orig)
    return KeyframeDeviation(d, d * 100 / seq_len, d * 1000 / fps, re - orig)


def deviation_record(orig: Annotation, re: Annotation, seq_len: int, fps: float) -> DeviationRecord:
    if not (math.isfinite(fps) and fps > 0):
        raise InvalidFps(f"fps must be > 0, got {fps!r}")
    validate_annotation(orig, seq_len)
    validate_annotation(re, seq_len)
    parts = [keyframe_deviation(o, r, seq_len, fps) for o, r in zip(orig.as_tuple(), re.as_tuple())]
    return DeviationRecord(*parts, seq_len=seq_len, fps=float(fps))


@dataclass(frozen=True)
class SweepCell:
    group: str
    lam: float
    mean_d_pct: float
    mean_d_ms: float
    n_samples: int


@dataclass(frozen=True)
class SweepReport:
    lambdas: Tuple[float, ...]
    groups: Tuple[str, ...]
    cells: Tuple[SweepCell, ...]

    def cell(self, group: str, lam: float) -> SweepCell:
        for c in self.cells:
            if c.group == group and c.lam == lam:
                return c
        raise KeyError((group, lam))

    def rows(self) -> List[dict]:
        return [
            {
                "group": c.group,
                "lambda": c.lam,
                "mean_d_pct": c.mean_d_pct,
                "mean_d_ms": c.mean_d_ms,
                "n_samples": c.n_samples,
            }
            for c in self.cells
        ]


@dataclass(frozen=True)
class CorpusItem:
    seq: FrameSequence
    ann: Annotation
    group: str = ""

    @property
    def sample_id(self) -> str:
        return self.seq.sample_id


def _deviate_one(item: CorpusItem, lam: float) -> DeviationRecord:
    try:
        res = reselect(item.seq, item.ann, SearchConfig.uniform(lam))
        return deviation_record(item.ann, res.reselected, len(item.seq), item.seq.fps)
    except InputError as exc:
        raise SampleError(item.sample_id, exc) from exc


def aggregate(records: Iterable[Tuple[str, float, DeviationRecord]]) -> List[SweepCell]:
    """Per (group, lambda) means; ``math.fsum`` keeps them independent of order."""
    pct: Dict[tuple, list] = defaultdict(list)
    ms: Dict[tuple, list] = defaultdict(list)
    for group, lam, rec in records:
        pct[(group, lam)].append(rec.mean_d_pct)
        ms[(group, lam)].append(rec.mean_d_ms)
    cells = []
    for key in sorted(pct):
        n = len(pct[key])
        cells.append(SweepCell(key[0], key[1], math.fsum(pct[key]) / n, math.fsum(ms[key]) / n, n))
    return cells


def lambda_sweep(
    corpus: Sequence[CorpusItem],
    lambdas: Sequence[float] = DEFAULT_SWEEP_LAMBDAS,
    map_fn: Optional[Callable] = None,
) -> SweepReport:
    """Re-select every sample at each lambda (rise and fall share it) and
    average the deviations per group.

    ``map_fn`` may be a parallel ``map`` (e.g. ``executor.map``); results are
    reduced in a fixed order so output does not depend on it.
    """
    if not corpus:
        raise InputError("sweep corpus is empty")
    lambdas = tuple(float(x) for x in lambdas)
    for lam in lambdas:
        if not 0.0 <= lam <= 1.0:
            raise InvalidLambda(f"lambda must lie in [0, 1], got {lam}")
    jobs = [(item, lam) for lam in lambdas for item in corpus]
    mapper = map_fn or map
    records = list(mapper(_deviate_star, jobs))
    triples = [(item.group, lam, rec) for (item, lam), rec in zip(jobs, records)]
    groups = tuple(sorted({item.group for item in corpus}))
    return SweepReport(lambdas, groups, tuple(aggregate(triples)))


def _deviate_star(job):
    return _deviate_one(*job)
