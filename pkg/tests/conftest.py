import numpy as np
import pytest

from mekeyframes.core import Annotation, Frame, FrameSequence


def make_seq(arrays, fps=30.0, sample_id="t"):
    return FrameSequence(tuple(Frame(a) for a in arrays), fps, sample_id=sample_id)


def random_instance(rng, max_len=30, max_side=8, levels=None):
    """Random small sequence plus a valid annotation.

    ``levels`` limits pixel values to ``range(levels)`` so exact ties between
    candidate pairs are common; otherwise pixels span 0..255.
    """
    n = int(rng.integers(2, max_len + 1))
    h = int(rng.integers(1, max_side + 1))
    w = int(rng.integers(1, max_side + 1))
    top = 256 if levels is None else levels
    arrays = [rng.integers(0, top, size=(h, w)).astype(float) for _ in range(n)]
    # occasionally duplicate frames to force ties
    for _ in range(int(rng.integers(0, 3))):
        i, j = rng.integers(0, n, size=2)
        arrays[i] = arrays[j].copy()
    idx = np.sort(rng.integers(0, n, size=3))
    return make_seq(arrays), Annotation(*(int(v) for v in idx))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
