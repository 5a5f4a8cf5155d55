"""Sample-level batch runners shared by the CLI.

Work is fanned out over a process pool when ``jobs > 1``; results always
come back in manifest order and every per-sample computation is independent,
so output is identical for any worker count.
"""

from __future__ import annotations

import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from .core import Reannotation, SearchConfig
from .deviation import CorpusItem, deviation_record, lambda_sweep
from .diffing import ReferenceMode, fall_difference, motion_intensity_curve, rise_difference
from .errors import InputError, InvariantViolation, SampleError, SpecInvalid
from .imageio import save_pnm
from .manifest import ManifestRow, write_manifest
from .oracle import brute_force_reselect
from .reports import write_json
from .reselection import reselect
from .synthgen import PROFILES, SyntheticSpec, corpus_specs, generate_sequence, perturb_annotation


@dataclass(frozen=True)
class LoadOptions:
    keep_color: bool = False
    size: Optional[Tuple[int, int]] = None
    resize_method: str = "nearest"

    def load(self, row: ManifestRow):
        return row.load_sequence(self.keep_color, self.size, self.resize_method)


def run_map(fn: Callable, items: Sequence, jobs: int = 1) -> List:
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _guard(sample_id: str, fn, *args):
    try:
        return fn(*args)
    except SampleError:
        raise
    except InputError as exc:
        raise SampleError(sample_id, exc) from exc


def _reselect_task(task) -> Reannotation:
    row, cfg, opts, oracle_check = task

    def work():
        seq = opts.load(row)
        res = reselect(seq, row.annotation, cfg)
        if oracle_check:
            ref = brute_force_reselect(seq, row.annotation, cfg)
            if not res.same_indices(ref):
                raise InvariantViolation(
                    f"sample {row.sample_id!r}: search picked {res.reselected}, "
                    f"oracle picked {ref.reselected}"
                )
        return res

    return _guard(row.sample_id, work)


def reselect_rows(rows, cfg: SearchConfig, opts=LoadOptions(), jobs: int = 1, oracle_check: bool = False):
    tasks = [(r, cfg, opts, oracle_check) for r in rows]
    return list(zip(rows, run_map(_reselect_task, tasks, jobs)))


def deviate_rows(rows, reannotations: dict):
    out = []
    for row in rows:
        if row.sample_id not in reannotations:
            raise InputError(f"no re-annotation for sample {row.sample_id!r}")
        rec = _guard(row.sample_id, deviation_record, row.annotation,
                     reannotations[row.sample_id], row.seq_len, row.fps)
        out.append((row, rec))
    return out


def _curve_task(task):
    row, mode, opts = task
    return _guard(row.sample_id, lambda: motion_intensity_curve(opts.load(row), mode, row.annotation.onset))


def curve_rows(rows, mode: ReferenceMode, opts=LoadOptions(), jobs: int = 1):
    return list(zip(rows, run_map(_curve_task, [(r, mode, opts) for r in rows], jobs)))


def _diff_task(task):
    row, which, cfg, opts = task

    def work():
        seq = opts.load(row)
        ann = row.annotation if cfg is None else reselect(seq, row.annotation, cfg).reselected
        out = {}
        if which in ("rise", "both"):
            out["rise"] = rise_difference(seq, ann.onset, ann.apex)
        if which in ("fall", "both"):
            out["fall"] = fall_difference(seq, ann.apex, ann.offset)
        return out

    return _guard(row.sample_id, work)


def difference_rows(rows, which: str, cfg: Optional[SearchConfig], opts=LoadOptions(), jobs: int = 1):
    return list(zip(rows, run_map(_diff_task, [(r, which, cfg, opts) for r in rows], jobs)))


def _load_item(task) -> CorpusItem:
    row, opts = task
    return CorpusItem(_guard(row.sample_id, opts.load, row), row.annotation, row.group)


def sweep_rows(rows, lambdas, opts=LoadOptions(), jobs: int = 1):
    items = [_load_item((r, opts)) for r in rows]
    if jobs <= 1:
        return lambda_sweep(items, lambdas)
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return lambda_sweep(items, lambdas, map_fn=pool.map)


# synthetic corpora ----------------------------------------------------------

SYNTH_EXTRA_KEYS = ("annotation_jitter", "subjects", "group", "label")


def parse_synth_template(obj: dict):
    """Split a synth JSON object into a template spec and corpus options."""
    if not isinstance(obj, dict):
        raise SpecInvalid("synth spec must be a JSON object")
    known = {f.name for f in fields(SyntheticSpec)} - {"seed"}
    unknown = set(obj) - known - set(SYNTH_EXTRA_KEYS)
    if unknown:
        raise SpecInvalid(f"unknown synth spec keys: {sorted(unknown)}")
    spec_kw = {k: v for k, v in obj.items() if k in known}
    mixed = spec_kw.get("profile") == "mixed"
    if mixed:
        spec_kw["profile"] = PROFILES[0]
    if spec_kw.get("distractor") is not None:
        spec_kw["distractor"] = tuple(spec_kw["distractor"])
    try:
        template = SyntheticSpec(**spec_kw)
    except TypeError as exc:
        raise SpecInvalid(str(exc)) from exc
    if mixed:
        # the fluctuating variant must itself be valid
        replace(template, profile="fluctuating")
    jitter = tuple(obj.get("annotation_jitter", (0, 0, 0)))
    if len(jitter) != 3:
        raise SpecInvalid("annotation_jitter needs three integers")
    opts = {
        "mixed": mixed,
        "jitter": jitter,
        "subjects": int(obj.get("subjects", 5)),
        "group": str(obj.get("group", "synthetic")),
        "label": str(obj.get("label", "")),
    }
    if opts["subjects"] < 1:
        raise SpecInvalid("subjects must be >= 1")
    return template, opts


def write_synthetic_corpus(template: SyntheticSpec, count: int, seed: int, out_dir: Path,
                           mixed: bool = False, jitter=(0, 0, 0), subjects: int = 5,
                           group: str = "synthetic", label: str = "") -> List[Path]:
    """Write frames as PGM files plus ``manifest.csv`` (possibly jittered
    annotations), ``ground_truth.csv`` and ``specs.json``."""
    if count < 1:
        raise InputError("count must be >= 1")
    out_dir = Path(out_dir)
    rows, truth, spec_dump = [], [], []
    for i, spec in enumerate(corpus_specs(template, count, seed, mixed=mixed)):
        sid = f"s{i:04d}"
        seq, gt = generate_sequence(spec, quantize=True, sample_id=sid)
        pattern = f"frames/{sid}"
        width = max(4, len(str(len(seq) - 1)))
        paths = []
        for t, frame in enumerate(seq.frames):
            p = out_dir / pattern / f"frame_{t:0{width}d}.pgm"
            save_pnm(p, frame.pixels)
            paths.append(p)
        ann = perturb_annotation(gt, jitter, len(seq))
        base = ManifestRow(sid, f"sub{i % subjects:02d}", label, group, spec.fps, 0, gt,
                           pattern, out_dir, tuple(paths))
        truth.append(base)
        rows.append(replace(base, annotation=ann))
        spec_dump.append({"sample_id": sid, **spec.to_json()})
    write_manifest(rows, out_dir / "manifest.csv")
    write_manifest(truth, out_dir / "ground_truth.csv")
    write_json(out_dir / "specs.json", spec_dump)
    return [out_dir / "manifest.csv", out_dir / "ground_truth.csv", out_dir / "specs.json"]


def load_synth_spec(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecInvalid(f"cannot read synth spec {path}: {exc}") from exc
