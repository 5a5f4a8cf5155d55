import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from mekeyframes.core import Frame
from mekeyframes.diffing import (
    DifferenceFrame,
    ReferenceMode,
    difference_frame,
    fall_difference,
    frame_l2,
    motion_intensity_curve,
    rise_difference,
)
from mekeyframes.errors import DimensionMismatch, OutOfRange
from mekeyframes.synthgen import SyntheticSpec, generate_sequence, patterns

from conftest import make_seq


def test_identical_frames_have_zero_distance():
    f = Frame(np.arange(12.0).reshape(3, 4))
    assert frame_l2(f, f) == 0.0


def test_three_four_five():
    a = Frame(np.array([[10.0, 20.0]]))
    b = Frame(np.array([[13.0, 24.0]]))
    assert frame_l2(a, b) == 5.0
    assert frame_l2(Frame(a.pixels * 2), Frame(b.pixels * 2)) == 10.0


def test_shape_mismatch():
    with pytest.raises(DimensionMismatch):
        frame_l2(Frame(np.zeros((2, 2))), Frame(np.zeros((2, 3))))
    with pytest.raises(DimensionMismatch):
        difference_frame(Frame(np.zeros((2, 2))), Frame(np.zeros((2, 2, 3))))


pixel_arrays = arrays(np.float64, (4, 5), elements=st.floats(0, 200, allow_nan=False))


@given(pixel_arrays, pixel_arrays)
def test_symmetry_and_antisymmetry(x, y):
    a, b = Frame(x), Frame(y)
    assert frame_l2(a, b) == frame_l2(b, a)
    assert difference_frame(a, b) == -difference_frame(b, a)


@given(pixel_arrays, pixel_arrays, st.floats(0, 55))
def test_shift_invariance(x, y, c):
    a, b = Frame(x), Frame(y)
    shifted = frame_l2(Frame(x + c), Frame(y + c))
    assert shifted == pytest.approx(frame_l2(a, b), rel=1e-9, abs=1e-9)


@given(pixel_arrays, pixel_arrays)
def test_scalar_and_image_forms_agree(x, y):
    a, b = Frame(x), Frame(y)
    d = difference_frame(a, b).values
    assert math.fsum((d * d).ravel()) == pytest.approx(frame_l2(a, b) ** 2, rel=1e-9, abs=1e-12)


@settings(max_examples=200)
@given(pixel_arrays, pixel_arrays, pixel_arrays)
def test_triangle_inequality(x, y, z):
    a, b, c = Frame(x), Frame(y), Frame(z)
    assert frame_l2(a, c) <= (frame_l2(a, b) + frame_l2(b, c)) * (1 + 1e-9) + 1e-12


def test_difference_frame_bounds():
    zero = Frame(np.zeros((2, 3)))
    full = Frame(np.full((2, 3), 255.0))
    assert np.all(difference_frame(full, zero).values == 255)
    assert np.all(difference_frame(zero, zero).values == 0)
    d = difference_frame(full, zero)
    assert (d.height, d.width, d.channels) == (2, 3, 1)


def test_uint8_mapping_rounds_half_up():
    d = DifferenceFrame(np.array([[-255.0, 0.0, 255.0, 1.0, -1.0]]))
    # (-255+255)/2=0, 127.5->128, 255, 128, 127
    np.testing.assert_array_equal(d.to_uint8(), [[0, 128, 255, 128, 127]])


def test_constant_sequence_curve_is_zero():
    seq = make_seq([np.full((3, 3), 50.0)] * 5)
    for mode in ReferenceMode:
        assert motion_intensity_curve(seq, mode, 2).values == (0.0,) * 5


def test_consecutive_two_frames():
    a, b = np.zeros((2, 2)), np.full((2, 2), 3.0)
    seq = make_seq([a, b])
    curve = motion_intensity_curve(seq, "consecutive")
    assert curve.values == (0.0, frame_l2(seq[1], seq[0]))
    assert curve.values[1] == 6.0


def test_fixed_first_ignores_ref_and_bad_ref_raises():
    seq = make_seq([np.full((2, 2), v) for v in (0.0, 1.0, 3.0)])
    assert motion_intensity_curve(seq, "fixed-first", 2).values == (0.0, 2.0, 6.0)
    with pytest.raises(OutOfRange):
        motion_intensity_curve(seq, "fixed-onset", 3)


def test_curve_peaks_at_synthetic_apex():
    spec = SyntheticSpec(length=30, width=10, height=10, gt_onset=4, gt_apex=13, gt_offset=25, seed=9)
    seq, gt = generate_sequence(spec)
    curve = motion_intensity_curve(seq, "fixed-onset", gt.onset)
    # exhaustive scan, independent of IntensityCurve.argmax
    values = list(curve.values)
    best = max(range(len(values)), key=lambda t: (values[t], -t))
    assert best == gt.apex == curve.argmax()
    assert curve.values[gt.onset] == 0.0


def test_rise_difference_is_localised_to_deformation_mask():
    spec = SyntheticSpec(length=30, width=20, height=20, gt_onset=3, gt_apex=12, gt_offset=24,
                         distractor=(20, 40.0), seed=4)
    seq, gt = generate_sequence(spec)
    _, _, _, mask = patterns(spec)
    rise = rise_difference(seq, gt.onset, gt.apex).values
    assert np.all(rise[~mask] == 0)
    assert np.all(rise[mask] > 0)
    fall = fall_difference(seq, gt.apex, gt.offset).values
    np.testing.assert_array_equal(fall, rise)
