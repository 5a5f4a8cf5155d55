"""Domain types shared by every other module.

Frame indices are 0-based everywhere inside the package; manifests declare
their own base and are normalised on load.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidFps,
    InvalidFrame,
    InvalidLambda,
    OrderViolation,
    OutOfRange,
)

LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def to_grayscale(rgb: np.ndarray) -> np.ndarray:
    """Luma conversion of an (H, W, 3) array to (H, W) float64."""
    rgb = np.asarray(rgb, dtype=np.float64)
    r, g, b = LUMA_WEIGHTS
    return r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2]


@dataclass(frozen=True, eq=False)
class Frame:
    """One raster frame with real-valued intensities in [0, 255].

    ``pixels`` is a read-only float64 array of shape (height, width) for
    grayscale or (height, width, 3) for RGB.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64, copy=True)
        if px.ndim == 3 and px.shape[2] == 1:
            px = px[:, :, 0]
        if px.ndim not in (2, 3) or (px.ndim == 3 and px.shape[2] != 3):
            raise InvalidFrame(f"unsupported frame shape {px.shape}")
        if px.size == 0:
            raise InvalidFrame("empty frame")
        if not np.all(np.isfinite(px)) or px.min() < 0 or px.max() > 255:
            raise InvalidFrame("pixel intensities must lie in [0, 255]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    @property
    def shape(self) -> tuple:
        return (self.height, self.width, self.channels)

    def grayscale(self) -> "Frame":
        if self.channels == 1:
            return self
        return Frame(to_grayscale(self.pixels))

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(
            np.array_equal(self.pixels, other.pixels)
        )

    def __hash__(self):
        return hash((self.pixels.shape, self.pixels.tobytes()))


@dataclass(frozen=True)
class FrameSequence:
    """Ordered frames of one sample plus its metadata."""

    frames: tuple
    fps: float
    sample_id: str = ""
    subject_id: str = ""
    label: Optional[str] = None

    def __post_init__(self):
        frames = tuple(self.frames)
        object.__setattr__(self, "frames", frames)
        if len(frames) < 2:
            raise InvalidFrame(f"sequence {self.sample_id!r} needs at least 2 frames")
        first = frames[0].shape
        for i, f in enumerate(frames):
            if f.shape != first:
                raise DimensionMismatch(
                    f"frame {i} of {self.sample_id!r} has shape {f.shape}, expected {first}"
                )
        if not (isinstance(self.fps, (int, float)) and math.isfinite(self.fps) and self.fps > 0):
            raise InvalidFps(f"fps must be > 0, got {self.fps!r}")

    def __len__(self) -> int:
        return len(self.frames)

    def __getitem__(self, i) -> Frame:
        return self.frames[i]

    @property
    def shape(self) -> tuple:
        return self.frames[0].shape


@dataclass(frozen=True)
class Annotation:
    """Onset / apex / offset frame indices (0-based)."""

    onset: int
    apex: int
    offset: int

    def __post_init__(self):
        for name in ("onset", "apex", "offset"):
            v = getattr(self, name)
            if isinstance(v, bool) or int(v) != v:
                raise OutOfRange(f"{name} must be an integer index, got {v!r}")
            object.__setattr__(self, name, int(v))

    def as_tuple(self) -> tuple:
        return (self.onset, self.apex, self.offset)


def validate_annotation(ann: Annotation, seq_len: int) -> Annotation:
    for name, v in zip(("onset", "apex", "offset"), ann.as_tuple()):
        if v < 0 or v >= seq_len:
            raise OutOfRange(f"{name}={v} outside [0, {seq_len})")
    if ann.onset > ann.apex or ann.apex > ann.offset:
        raise OrderViolation(
            f"expected onset <= apex <= offset, got {ann.onset}, {ann.apex}, {ann.offset}"
        )
    return ann


def search_radius(span: int, lam: float) -> int:
    """Integer search radius ``floor(span * lam)``.

    The product is rounded to 9 decimals first so that values such as
    ``100 * 0.29`` (28.999999999999996 in binary) land on the intended step.
    """
    if span < 0:
        raise OutOfRange(f"span must be >= 0, got {span}")
    return max(0, math.floor(round(span * lam, 9)))


@dataclass(frozen=True)
class SearchConfig:
    lambda_rise: float = 0.1
    lambda_fall: float = 0.1

    def __post_init__(self):
        for name in ("lambda_rise", "lambda_fall"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and 0.0 <= v <= 1.0):
                raise InvalidLambda(f"{name} must lie in [0, 1], got {v!r}")
            object.__setattr__(self, name, float(v))

    @classmethod
    def uniform(cls, lam: float) -> "SearchConfig":
        return cls(lam, lam)

    def rise_radius(self, ann: Annotation) -> int:
        return search_radius(ann.apex - ann.onset, self.lambda_rise)

    def fall_radius(self, ann: Annotation) -> int:
        return search_radius(ann.offset - ann.apex, self.lambda_fall)


@dataclass(frozen=True)
class Reannotation:
    original: Annotation
    reselected: Annotation
    rise_peak_diff: float
    fall_peak_diff: float
    rise_candidate_count: int
    fall_candidate_count: int
    rise_radius: int = 0
    fall_radius: int = 0
    # True when no offset candidate lay after the new apex and the fallback was used
    degenerate: bool = False

    def same_indices(self, other: "Reannotation") -> bool:
        return self.reselected == other.reselected and self.degenerate == other.degenerate
