"""Pixel-space difference primitives: L2 frame distance, motion-intensity
curves and signed difference frames."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .core import Frame, FrameSequence
from .errors import DimensionMismatch, OutOfRange


class ReferenceMode(str, Enum):
    FIXED_ONSET = "fixed-onset"
    FIXED_FIRST = "fixed-first"
    CONSECUTIVE = "consecutive"


def _check_shapes(a: Frame, b: Frame) -> None:
    if a.pixels.shape != b.pixels.shape:
        raise DimensionMismatch(f"frame shapes differ: {a.pixels.shape} vs {b.pixels.shape}")


def squared_l2(a: Frame, b: Frame) -> float:
    # np.add.reduce on a contiguous 1-D buffer uses pairwise summation,
    # which is deterministic and far more accurate than a running sum.
    _check_shapes(a, b)
    d = (a.pixels - b.pixels).ravel()
    return float(np.add.reduce(d * d))


def frame_l2(a: Frame, b: Frame) -> float:
    """Unnormalised Euclidean distance between two frames."""
    return math.sqrt(squared_l2(a, b))


@dataclass(frozen=True)
class IntensityCurve:
    values: tuple
    reference_mode: ReferenceMode
    reference_index: int = 0

    def __len__(self):
        return len(self.values)

    def argmax(self) -> int:
        # first maximum wins
        return int(np.argmax(np.asarray(self.values)))


def motion_intensity_curve(
    seq: FrameSequence, mode: ReferenceMode | str = ReferenceMode.FIXED_ONSET, ref: int = 0
) -> IntensityCurve:
    """Per-frame L2 distance to a reference frame (fixed modes) or to the
    previous frame (consecutive mode).

    ``ref`` is the reference frame index for ``fixed-onset``; ``fixed-first``
    always uses frame 0 and ``consecutive`` ignores it.
    """
    mode = ReferenceMode(mode)
    n = len(seq)
    if mode is ReferenceMode.CONSECUTIVE:
        values = [0.0] + [frame_l2(seq[t], seq[t - 1]) for t in range(1, n)]
        return IntensityCurve(tuple(values), mode, 0)
    if mode is ReferenceMode.FIXED_FIRST:
        ref = 0
    if not 0 <= ref < n:
        raise OutOfRange(f"reference index {ref} outside [0, {n})")
    reference = seq[ref]
    values = [0.0 if t == ref else frame_l2(seq[t], reference) for t in range(n)]
    return IntensityCurve(tuple(values), mode, ref)


@dataclass(frozen=True, eq=False)
class DifferenceFrame:
    """Signed per-pixel difference ``a - b``; values lie in [-255, 255]."""

    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.values.ndim == 2 else self.values.shape[2]

    def __neg__(self) -> "DifferenceFrame":
        return DifferenceFrame(-self.values)

    def __eq__(self, other):
        if not isinstance(other, DifferenceFrame):
            return NotImplemented
        return bool(np.array_equal(self.values, other.values))

    def to_uint8(self) -> np.ndarray:
        """Visualisation mapping ``round((v + 255) / 2)``, halves rounded up.

        (v + 255) / 2 is never negative, so rounding half away from zero is
        ``floor(x + 0.5)``.
        """
        return np.floor((self.values + 255.0) / 2.0 + 0.5).astype(np.uint8)


def difference_frame(a: Frame, b: Frame) -> DifferenceFrame:
    _check_shapes(a, b)
    return DifferenceFrame(a.pixels - b.pixels)


def rise_difference(seq: FrameSequence, onset: int, apex: int) -> DifferenceFrame:
    """Difference frame of the rise phase: apex minus onset."""
    return difference_frame(seq[apex], seq[onset])


def fall_difference(seq: FrameSequence, apex: int, offset: int) -> DifferenceFrame:
    """Difference frame of the fall phase: apex minus offset."""
    return difference_frame(seq[apex], seq[offset])
