import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from mekeyframes.cli import main
from mekeyframes.imageio import decode_pnm

SPEC = {
    "length": 30, "width": 12, "height": 12, "fps": 200, "profile": "mixed",
    "gt_onset": 4, "gt_apex": 16, "gt_offset": 26, "peak_amplitude": 90,
    "bump_amplitude": 25, "bump_center": 18, "noise_sigma": 1.0,
    "annotation_jitter": [1, -1, 0], "subjects": 3,
}


@pytest.fixture
def corpus(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps(SPEC))
    assert main(["synth", "--spec", str(spec), "--count", "6", "--seed", "5", "--out", str(tmp_path / "c")]) == 0
    return tmp_path / "c"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_synth_layout(corpus):
    rows = read_csv(corpus / "manifest.csv")
    truth = read_csv(corpus / "ground_truth.csv")
    assert len(rows) == 6 and [r["subject_id"] for r in rows] == ["sub00", "sub01", "sub02"] * 2
    assert (rows[0]["onset"], rows[0]["apex"]) == ("5", "15")
    assert (truth[0]["onset"], truth[0]["apex"]) == ("4", "16")
    frames = sorted((corpus / "frames" / "s0000").iterdir())
    assert len(frames) == 30 and frames[0].name == "frame_0000.pgm"
    assert decode_pnm(frames[0].read_bytes()).shape == (12, 12)
    specs = json.loads((corpus / "specs.json").read_text())
    assert [s["profile"] for s in specs[:2]] == ["smooth", "fluctuating"]


def test_reselect_zero_lambda_is_identity(corpus, tmp_path):
    assert main(["reselect", "--manifest", str(corpus / "manifest.csv"), "--lambda", "0", "--out", str(tmp_path / "r")]) == 0
    for r in read_csv(tmp_path / "r" / "reannotations.csv"):
        assert (r["onset_re"], r["apex_re"], r["offset_re"]) == (r["onset"], r["apex"], r["offset"])


def test_reselect_oracle_check_and_jobs(corpus, tmp_path):
    m = str(corpus / "manifest.csv")
    assert main(["reselect", "--manifest", m, "--lambda-rise", "0.3", "--lambda-fall", "0.2",
                 "--out", str(tmp_path / "a"), "--oracle-check"]) == 0
    assert main(["reselect", "--manifest", m, "--lambda-rise", "0.3", "--lambda-fall", "0.2",
                 "--out", str(tmp_path / "b"), "--jobs", "3"]) == 0
    a = (tmp_path / "a" / "reannotations.csv").read_bytes()
    assert a == (tmp_path / "b" / "reannotations.csv").read_bytes()


def test_deviate_and_sweep(corpus, tmp_path):
    m = str(corpus / "manifest.csv")
    main(["reselect", "--manifest", m, "--lambda", "0.2", "--out", str(tmp_path / "r")])
    assert main(["deviate", "--manifest", m, "--reannotations", str(tmp_path / "r" / "reannotations.csv"),
                 "--out", str(tmp_path / "d")]) == 0
    devs = json.loads((tmp_path / "d" / "deviations.json").read_text())
    table = read_csv(tmp_path / "d" / "deviations.csv")
    assert len(devs) == len(table) == 6
    for d in devs:
        assert d["mean_d_ms"] == pytest.approx(sum(d[k]["d_ms"] for k in ("onset", "apex", "offset")) / 3)
    assert main(["sweep", "--manifest", m, "--out", str(tmp_path / "s")]) == 0
    sweep = read_csv(tmp_path / "s" / "sweep.csv")
    assert [r["lambda"] for r in sweep] == ["0.05", "0.1", "0.15", "0.2"]
    assert list(sweep[0]) == ["group", "lambda", "mean_d_pct", "mean_d_ms", "n_samples"]
    js = json.loads((tmp_path / "s" / "sweep.json").read_text())
    assert list(js[0]) == ["group", "lambda", "mean_d_pct", "mean_d_ms", "n_samples"]
    # the 0.2 sweep cell equals the mean of the deviate run at the same lambda
    assert js[3]["mean_d_ms"] == pytest.approx(np.mean([d["mean_d_ms"] for d in devs]), rel=1e-12)


def test_curve_and_diffframe(corpus, tmp_path):
    m = str(corpus / "manifest.csv")
    for mode in ("fixed-onset", "fixed-first", "consecutive"):
        out = tmp_path / mode
        assert main(["curve", "--manifest", m, "--mode", mode, "--out", str(out)]) == 0
        rows = read_csv(out / "curves" / "s0000.csv")
        assert len(rows) == 30 and list(rows[0]) == ["frame_index", "value"]
    assert main(["diffframe", "--manifest", m, "--which", "both", "--use-reselected",
                 "--out", str(tmp_path / "df")]) == 0
    pgm = decode_pnm((tmp_path / "df" / "diffframes" / "s0001_rise.pgm").read_bytes())
    grid = np.loadtxt(tmp_path / "df" / "diffframes" / "s0001_rise.csv", delimiter=",", skiprows=1)
    np.testing.assert_array_equal(pgm, np.floor((grid + 255) / 2 + 0.5))
    assert main(["diffframe", "--manifest", m, "--which", "rise", "--resize", "6x6",
                 "--out", str(tmp_path / "small")]) == 0
    assert decode_pnm((tmp_path / "small" / "diffframes" / "s0000_rise.pgm").read_bytes()).shape == (6, 6)


def test_eval_metrics(tmp_path):
    p = tmp_path / "p.csv"
    rows = ["sample_id,true_label,predicted_label"]
    rows += [f"a{i},A,A" for i in range(3)] + ["a3,A,B"] + ["b0,B,A", "b1,B,A"] + [f"b{i},B,B" for i in range(2, 6)]
    p.write_text("\n".join(rows) + "\n")
    assert main(["eval", "--predictions", str(p), "--out", str(tmp_path / "e")]) == 0
    rep = json.loads((tmp_path / "e" / "metrics.json").read_text())
    assert rep["acc"] == 0.7
    assert rep["uf1"] == pytest.approx(0.696970, abs=1e-6)
    assert rep["uar"] == pytest.approx(0.708333, abs=1e-6)
    assert set(rep["per_class"]) == {"A", "B"}
    assert main(["eval", "--predictions", str(p), "--uf1-as-printed", "--out", str(tmp_path / "e2")]) == 0
    assert json.loads((tmp_path / "e2" / "metrics.json").read_text())["uf1"] > rep["uf1"]


def test_eval_loso(corpus, tmp_path):
    assert main(["eval", "loso", "--manifest", str(corpus / "manifest.csv"), "--out", str(tmp_path / "l")]) == 0
    splits = json.loads((tmp_path / "l" / "loso_splits.json").read_text())
    assert [s["held_out_subject"] for s in splits] == ["sub00", "sub01", "sub02"]
    assert sorted(x for s in splits for x in s["test_ids"]) == [f"s{i:04d}" for i in range(6)]


def test_exit_codes(tmp_path, corpus, capsys):
    assert main(["reselect", "--manifest", str(tmp_path / "missing.csv"), "--out", str(tmp_path / "o")]) == 1
    assert main(["reselect", "--manifest", str(corpus / "manifest.csv"), "--lambda", "2", "--out", str(tmp_path / "o")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"length": 5, "gt_onset": 3, "gt_apex": 2, "gt_offset": 4}))
    assert main(["synth", "--spec", str(bad), "--out", str(tmp_path / "x")]) == 1
    assert "error" in capsys.readouterr().err


def test_invariant_violation_exits_2(corpus, tmp_path, monkeypatch):
    import mekeyframes.pipeline as pipeline
    from mekeyframes.core import Annotation

    real = pipeline.brute_force_reselect

    def skewed(seq, ann, cfg):
        res = real(seq, ann, cfg)
        return type(res)(**{**res.__dict__, "reselected": Annotation(0, 0, 0)})

    monkeypatch.setattr(pipeline, "brute_force_reselect", skewed)
    code = main(["reselect", "--manifest", str(corpus / "manifest.csv"), "--out", str(tmp_path / "o"), "--oracle-check"])
    assert code == 2


def test_module_entry_point(corpus, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "mekeyframes", "reselect", "--manifest", str(corpus / "manifest.csv"),
         "--lambda", "0.1", "--out", str(tmp_path / "o")],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "o" / "reannotations.csv").exists()
