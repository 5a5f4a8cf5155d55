"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import sys
from pathlib import Path

from .core import SearchConfig
from .deviation import DEFAULT_SWEEP_LAMBDAS
from .diffing import ReferenceMode
from .errors import InputError, InvariantViolation, KeyframeError, ParseError, SampleError
from .evaluation import ConfusionMatrix, loso_splits, metrics_report
from .manifest import csv_text, load_manifest
from .pipeline import (
    LoadOptions,
    curve_rows,
    deviate_rows,
    difference_rows,
    load_synth_spec,
    parse_synth_template,
    reselect_rows,
    sweep_rows,
    write_synthetic_corpus,
)
from .reports import (
    read_reannotations,
    write_curve,
    write_deviations,
    write_difference,
    write_json,
    write_reannotations,
    write_sweep,
    write_text,
)

log = logging.getLogger("mekeyframes")


def _size(text: str):
    try:
        w, h = text.lower().split("x")
        w, h = int(w), int(h)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w < 1 or h < 1:
        raise argparse.ArgumentTypeError("resize dimensions must be positive")
    return (w, h)


def _lambda_list(text: str):
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad lambda list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty lambda list")
    return vals


def _add_load_options(p):
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--keep-color", action="store_true", help="diff RGB channels instead of luma")
    p.add_argument("--resize", type=_size, default=None, metavar="WxH")
    p.add_argument("--resize-method", choices=("nearest", "bilinear"), default="nearest")


def _add_lambda_options(p, default):
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="sets both radii factors")
    p.add_argument("--lambda-rise", type=float, default=default)
    p.add_argument("--lambda-fall", type=float, default=default)


def _search_config(args) -> SearchConfig:
    if args.lam is not None:
        return SearchConfig(args.lam, args.lam)
    return SearchConfig(args.lambda_rise, args.lambda_fall)


def _load_options(args) -> LoadOptions:
    return LoadOptions(args.keep_color, args.resize, args.resize_method)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mekeyframes", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reselect", help="re-select onset/apex/offset for every sample")
    _add_load_options(p)
    _add_lambda_options(p, 0.1)
    p.add_argument("--oracle-check", action="store_true",
                   help="cross-check every sample against the brute-force search")

    p = sub.add_parser("curve", help="motion-intensity curves")
    _add_load_options(p)
    p.add_argument("--mode", choices=[m.value for m in ReferenceMode], default=ReferenceMode.FIXED_ONSET.value)

    p = sub.add_parser("diffframe", help="rise/fall difference frames")
    _add_load_options(p)
    p.add_argument("--which", choices=("rise", "fall", "both"), default="both")
    p.add_argument("--use-reselected", action="store_true")
    _add_lambda_options(p, 0.1)

    p = sub.add_parser("deviate", help="deviation between manifest and re-annotations")
    p.add_argument("--manifest", required=True, type=Path)
    p.add_argument("--reannotations", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("sweep", help="deviation per group across lambda values")
    _add_load_options(p)
    p.add_argument("--lambdas", type=_lambda_list, default=DEFAULT_SWEEP_LAMBDAS)

    p = sub.add_parser("synth", help="write a synthetic corpus")
    p.add_argument("--spec", required=True, type=Path)
    p.add_argument("--count", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("eval", help="recognition metrics or LOSO splits")
    p.add_argument("--predictions", type=Path)
    p.add_argument("--uf1-as-printed", action="store_true",
                   help="use 2TP/(TP+FP+FN) instead of the standard F1 denominator")
    p.add_argument("--out", type=Path)
    esub = p.add_subparsers(dest="eval_command")
    lp = esub.add_parser("loso", help="leave-one-subject-out splits from a manifest")
    lp.add_argument("--manifest", required=True, type=Path)
    lp.add_argument("--out", required=True, type=Path, dest="loso_out")
    return parser


def cmd_reselect(args):
    rows = load_manifest(args.manifest)
    results = reselect_rows(rows, _search_config(args), _load_options(args), args.jobs, args.oracle_check)
    path = write_reannotations(args.out / "reannotations.csv", results)
    log.info("wrote %s (%d samples)", path, len(results))


def cmd_curve(args):
    rows = load_manifest(args.manifest)
    results = curve_rows(rows, ReferenceMode(args.mode), _load_options(args), args.jobs)
    for row, curve in results:
        write_curve(args.out / "curves" / f"{row.sample_id}.csv", curve)


def cmd_diffframe(args):
    rows = load_manifest(args.manifest)
    cfg = _search_config(args) if args.use_reselected else None
    results = difference_rows(rows, args.which, cfg, _load_options(args), args.jobs)
    for row, diffs in results:
        for phase, diff in diffs.items():
            write_difference(args.out / "diffframes", f"{row.sample_id}_{phase}", diff)


def cmd_deviate(args):
    rows = load_manifest(args.manifest)
    results = deviate_rows(rows, read_reannotations(args.reannotations))
    write_deviations(args.out, results)


def cmd_sweep(args):
    rows = load_manifest(args.manifest)
    report = sweep_rows(rows, args.lambdas, _load_options(args), args.jobs)
    write_sweep(args.out, report)


def cmd_synth(args):
    template, opts = parse_synth_template(load_synth_spec(args.spec))
    write_synthetic_corpus(template, args.count, args.seed, args.out, **opts)


def read_predictions(path: Path):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    expected = ("sample_id", "true_label", "predicted_label")
    if tuple(reader.fieldnames or ()) != expected:
        raise ParseError(f"{path}: line 1: expected header {','.join(expected)}")
    return [(r["true_label"], r["predicted_label"]) for r in reader]


def cmd_eval(args):
    if args.eval_command == "loso":
        rows = load_manifest(args.manifest, resolve=False)
        splits = loso_splits([(r.sample_id, r.subject_id) for r in rows])
        write_json(args.loso_out / "loso_splits.json", [
            {"held_out_subject": s.held_out_subject, "train_ids": list(s.train_ids), "test_ids": list(s.test_ids)}
            for s in splits
        ])
        write_text(args.loso_out / "loso_splits.csv", csv_text(
            ("held_out_subject", "n_train", "n_test"),
            ([s.held_out_subject, len(s.train_ids), len(s.test_ids)] for s in splits),
        ))
        return
    if args.predictions is None or args.out is None:
        raise InputError("eval needs --predictions and --out (or the 'loso' subcommand)")
    pairs = read_predictions(args.predictions)
    classes = sorted({c for pair in pairs for c in pair})
    cm = ConfusionMatrix.from_labels(classes, pairs)
    report = metrics_report(cm, as_printed=args.uf1_as_printed)
    report["uf1_variant"] = "as-printed" if args.uf1_as_printed else "standard"
    report["confusion_matrix"] = {"class_names": list(cm.class_names), "counts": cm.counts.tolist()}
    write_json(args.out / "metrics.json", report)


COMMANDS = {
    "reselect": cmd_reselect,
    "curve": cmd_curve,
    "diffframe": cmd_diffframe,
    "deviate": cmd_deviate,
    "sweep": cmd_sweep,
    "synth": cmd_synth,
    "eval": cmd_eval,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    if getattr(args, "jobs", 1) < 1:
        print("error: --jobs must be >= 1", file=sys.stderr)
        return 1
    try:
        COMMANDS[args.command](args)
    except SampleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, InvariantViolation) else 1
    except InvariantViolation as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 2
    except (InputError, KeyframeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
