"""Seeded synthetic sequences with known keyframes.

Each frame is ``clamp(base + a(t) * deform + blink(t) * distractor + noise)``
where ``a(t)`` is a piecewise-linear expression amplitude (zero before the
onset, linear rise to the apex, linear decay to zero at the offset, plus an
optional triangular bump for the fluctuating profile).  The deformation and
distractor patterns live in disjoint rectangular blocks, each covering about
a tenth of the image.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace
from typing import Iterator, Optional, Tuple

import numpy as np

from .core import Annotation, Frame, FrameSequence
from .errors import InfeasibleJitter, SpecInvalid

PROFILES = ("smooth", "fluctuating")
MASK_FRACTION = 0.1


@dataclass(frozen=True)
class SyntheticSpec:
    length: int = 40
    width: int = 16
    height: int = 16
    fps: float = 30.0
    profile: str = "smooth"
    gt_onset: int = 5
    gt_apex: int = 15
    gt_offset: int = 30
    peak_amplitude: float = 100.0
    bump_amplitude: float = 0.0
    bump_center: Optional[int] = None
    bump_halfwidth: int = 3
    # (center index, amplitude) of a short blink-like event, or None
    distractor: Optional[Tuple[int, float]] = None
    distractor_halfwidth: int = 2
    noise_sigma: float = 0.0
    seed: int = 0
    base_low: int = 16
    base_high: int = 96

    def __post_init__(self):
        if self.distractor is not None:
            c, amp = self.distractor
            object.__setattr__(self, "distractor", (int(c), float(amp)))
        self.validate()

    def validate(self) -> None:
        if self.profile not in PROFILES:
            raise SpecInvalid(f"profile must be one of {PROFILES}, got {self.profile!r}")
        if self.width < 1 or self.height < 2:
            raise SpecInvalid("frames need width >= 1 and height >= 2")
        if not 0 <= self.gt_onset < self.gt_apex < self.gt_offset < self.length:
            raise SpecInvalid(
                "need 0 <= gt_onset < gt_apex < gt_offset < length, got "
                f"{self.gt_onset}, {self.gt_apex}, {self.gt_offset}, {self.length}"
            )
        if not (math.isfinite(self.fps) and self.fps > 0):
            raise SpecInvalid(f"fps must be > 0, got {self.fps}")
        if not 0 <= self.peak_amplitude <= 255:
            raise SpecInvalid(f"peak_amplitude must lie in [0, 255], got {self.peak_amplitude}")
        if self.bump_amplitude < 0 or self.noise_sigma < 0:
            raise SpecInvalid("bump_amplitude and noise_sigma must be >= 0")
        if self.profile == "fluctuating" and self.bump_amplitude > 0:
            if self.bump_center is None or not 0 <= self.bump_center < self.length:
                raise SpecInvalid("fluctuating profile needs bump_center inside the sequence")
        if self.bump_halfwidth < 1 or self.distractor_halfwidth < 1:
            raise SpecInvalid("half-widths must be >= 1")
        if self.distractor is not None:
            c, amp = self.distractor
            if not 0 <= c < self.length or amp < 0:
                raise SpecInvalid(f"bad distractor {self.distractor}")
        if not 0 <= self.base_low <= self.base_high <= 255:
            raise SpecInvalid("need 0 <= base_low <= base_high <= 255")
        top = self.base_high + max(float(self.amplitudes().max()), self._distractor_peak())
        if top > 255:
            raise SpecInvalid(f"amplitudes push pixels to {top:g} > 255")

    def _distractor_peak(self) -> float:
        return 0.0 if self.distractor is None else self.distractor[1]

    def amplitudes(self) -> np.ndarray:
        """Expression amplitude ``a(t)`` for every frame."""
        t = np.arange(self.length, dtype=np.float64)
        on, ap, off = self.gt_onset, self.gt_apex, self.gt_offset
        a = np.zeros(self.length)
        rise = (t > on) & (t <= ap)
        a[rise] = self.peak_amplitude * (t[rise] - on) / (ap - on)
        fall = (t > ap) & (t < off)
        a[fall] = self.peak_amplitude * (off - t[fall]) / (off - ap)
        if self.profile == "fluctuating" and self.bump_amplitude > 0:
            a += _triangle(t, self.bump_center, self.bump_halfwidth, self.bump_amplitude)
        return a

    def distractor_levels(self) -> np.ndarray:
        t = np.arange(self.length, dtype=np.float64)
        if self.distractor is None:
            return np.zeros(self.length)
        c, amp = self.distractor
        return _triangle(t, c, self.distractor_halfwidth, amp)

    def ground_truth(self) -> Annotation:
        return Annotation(self.gt_onset, self.gt_apex, self.gt_offset)

    def to_json(self) -> dict:
        d = asdict(self)
        if self.distractor is not None:
            d["distractor"] = list(self.distractor)
        return d


def _triangle(t, center, halfwidth, amp):
    return amp * np.clip(1.0 - np.abs(t - center) / halfwidth, 0.0, None)


def _block(height: int, width: int) -> Tuple[int, int]:
    bh = max(1, min(height // 2, round(height * math.sqrt(MASK_FRACTION))))
    bw = max(1, min(width, round(MASK_FRACTION * height * width / bh)))
    return bh, bw


def patterns(spec: SyntheticSpec):
    """Return ``(base, deformation, distractor, deformation_mask)`` arrays."""
    rng = np.random.default_rng(spec.seed)
    h, w = spec.height, spec.width
    base = rng.integers(spec.base_low, spec.base_high + 1, size=(h, w)).astype(np.float64)
    bh, bw = _block(h, w)
    c0 = (w - bw) // 2
    mask = np.zeros((h, w), dtype=bool)
    mask[h - bh:, c0:c0 + bw] = True
    deform = np.zeros((h, w))
    deform[mask] = rng.uniform(0.5, 1.0, size=int(mask.sum()))
    emask = np.zeros((h, w), dtype=bool)
    emask[:bh, c0:c0 + bw] = True
    distract = np.zeros((h, w))
    distract[emask] = rng.uniform(0.5, 1.0, size=int(emask.sum()))
    return base, deform, distract, mask


def generate_sequence(
    spec: SyntheticSpec, quantize: bool = False, sample_id: str = "", subject_id: str = ""
):
    """Build ``(FrameSequence, ground-truth Annotation)`` from ``spec``.

    With ``quantize`` the frames are rounded to integers (halves up), as
    they would be when written to an 8-bit image file.
    """
    base, deform, distract, _ = patterns(spec)
    noise_rng = np.random.default_rng([spec.seed, 1])
    amps = spec.amplitudes()
    blinks = spec.distractor_levels()
    frames = []
    for t in range(spec.length):
        img = base + amps[t] * deform + blinks[t] * distract
        if spec.noise_sigma > 0:
            img = img + noise_rng.normal(0.0, spec.noise_sigma, size=img.shape)
        img = np.clip(img, 0.0, 255.0)
        if quantize:
            img = np.floor(img + 0.5)
        frames.append(Frame(img))
    seq = FrameSequence(tuple(frames), spec.fps, sample_id=sample_id, subject_id=subject_id)
    return seq, spec.ground_truth()


def perturb_annotation(gt: Annotation, jitter, seq_len: int) -> Annotation:
    """Shift each keyframe by a signed jitter, then clamp into a valid
    annotation (indices in range, onset <= apex <= offset)."""
    if seq_len < 1:
        raise InfeasibleJitter("sequence is empty")
    if not all(0 <= v < seq_len for v in gt.as_tuple()):
        raise InfeasibleJitter(f"ground truth {gt} lies outside a sequence of {seq_len} frames")
    j_on, j_ap, j_off = (int(j) for j in jitter)
    hi = seq_len - 1
    onset = min(max(gt.onset + j_on, 0), hi)
    apex = min(max(gt.apex + j_ap, onset), hi)
    offset = min(max(gt.offset + j_off, apex), hi)
    return Annotation(onset, apex, offset)


def derive_seed(seed: int, ordinal: int) -> int:
    """Per-sample seed from (corpus seed, sample ordinal)."""
    state = np.random.SeedSequence([seed & (2**64 - 1), ordinal]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def corpus_specs(template: SyntheticSpec, count: int, seed: int, mixed: bool = False) -> Iterator[SyntheticSpec]:
    """``count`` copies of ``template`` with derived seeds; ``mixed``
    alternates smooth and fluctuating profiles."""
    for i in range(count):
        spec = replace(template, seed=derive_seed(seed, i))
        if mixed:
            spec = replace(spec, profile=PROFILES[i % 2])
        yield spec
