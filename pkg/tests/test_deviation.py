import random

import pytest

from mekeyframes.core import Annotation, SearchConfig
from mekeyframes.deviation import CorpusItem, deviation_record, lambda_sweep
from mekeyframes.errors import InputError, InvalidFps, InvalidLambda, SampleError
from mekeyframes.reselection import reselect
from mekeyframes.synthgen import SyntheticSpec, corpus_specs, generate_sequence


def test_equal_annotations_have_zero_deviation():
    ann = Annotation(3, 10, 20)
    rec = deviation_record(ann, ann, 30, 200.0)
    assert all(e.d_frames == 0 and e.d_pct == 0 and e.d_ms == 0 for e in rec.entries())
    assert rec.mean_d_ms == 0


def test_one_frame_at_200_fps_is_five_ms():
    rec = deviation_record(Annotation(0, 50, 80), Annotation(0, 51, 80), 100, 200.0)
    assert rec.apex.d_ms == 5.0


def test_percent_of_sequence_length():
    rec = deviation_record(Annotation(0, 50, 80), Annotation(0, 52, 80), 100, 200.0)
    assert rec.apex.d_pct == 2.0
    assert rec.apex.d_frames == 2 and rec.apex.signed == 2


def test_mean_and_signed():
    rec = deviation_record(Annotation(4, 10, 20), Annotation(5, 8, 23), 40, 30.0)
    assert [e.signed for e in rec.entries()] == [1, -2, 3]
    assert rec.mean_d_ms == (1000 / 30 + 2000 / 30 + 3000 / 30) / 3
    for e in rec.entries():
        assert e.d_pct == e.d_frames / 40 * 100
        assert e.d_ms == e.d_frames * 1000 / 30
        assert (e.d_ms == 0) == (e.d_frames == 0)


def test_invalid_fps():
    with pytest.raises(InvalidFps):
        deviation_record(Annotation(0, 1, 2), Annotation(0, 1, 2), 5, 0.0)


def _corpus(count=8, profile="smooth", group="A", seed=0, **kw):
    template = SyntheticSpec(length=40, width=10, height=10, gt_onset=4, gt_apex=24, gt_offset=34,
                             profile=profile, fps=100.0, **kw)
    items = []
    for i, spec in enumerate(corpus_specs(template, count, seed)):
        seq, gt = generate_sequence(spec, sample_id=f"{group}{i}")
        items.append(CorpusItem(seq, gt, group))
    return items


def test_sweep_at_zero_is_all_zero():
    corpus = _corpus(4) + _corpus(4, group="B", seed=1)
    rep = lambda_sweep(corpus, [0.0])
    assert [(c.group, c.mean_d_pct, c.mean_d_ms, c.n_samples) for c in rep.cells] == [
        ("A", 0.0, 0.0, 4), ("B", 0.0, 0.0, 4)]


def test_smooth_group_without_jitter_stays_put():
    rep = lambda_sweep(_corpus(6), [0.05, 0.1, 0.15, 0.2])
    assert all(c.mean_d_ms == 0 for c in rep.cells)


def test_bump_group_deviation_grows_once_reached():
    # bump at apex+3 rises above the peak; R_rise = floor(20 * lam) reaches it at lam = 0.15
    corpus = _corpus(6, profile="fluctuating", bump_amplitude=40.0, bump_center=27, bump_halfwidth=1)
    rep = lambda_sweep(corpus, [0.05, 0.1, 0.15, 0.2])
    ms = [rep.cell("A", lam).mean_d_ms for lam in rep.lambdas]
    assert ms[0] == ms[1] == 0
    assert ms[2] > ms[1]


def test_sweep_is_permutation_invariant():
    corpus = _corpus(5, noise_sigma=3.0) + _corpus(5, group="B", seed=4, noise_sigma=3.0)
    rep = lambda_sweep(corpus, [0.1, 0.25])
    shuffled = corpus[:]
    random.Random(7).shuffle(shuffled)
    assert lambda_sweep(shuffled, [0.1, 0.25]) == rep


def test_sweep_matches_direct_computation():
    corpus = _corpus(3, noise_sigma=5.0)
    rep = lambda_sweep(corpus, [0.2])
    recs = [deviation_record(it.ann, reselect(it.seq, it.ann, SearchConfig.uniform(0.2)).reselected,
                             len(it.seq), it.seq.fps) for it in corpus]
    assert rep.cell("A", 0.2).mean_d_ms == pytest.approx(sum(r.mean_d_ms for r in recs) / 3, rel=1e-12)


def test_sweep_errors():
    with pytest.raises(InputError):
        lambda_sweep([], [0.1])
    with pytest.raises(InvalidLambda):
        lambda_sweep(_corpus(1), [1.5])
    bad = _corpus(1)[0]
    broken = CorpusItem(bad.seq, Annotation(0, 5, 99), "A")
    with pytest.raises(SampleError) as info:
        lambda_sweep([broken], [0.1])
    assert info.value.sample_id == "A0"
