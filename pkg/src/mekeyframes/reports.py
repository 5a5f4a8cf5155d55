"""CSV/JSON report writers.

Tables print reals with 6 significant digits; JSON keeps full precision.
Every file is written to a temporary name and renamed into place.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Dict, Iterable, List, Sequence, Tuple

from .core import Annotation, Reannotation
from .deviation import KEYFRAMES, DeviationRecord, SweepReport
from .diffing import DifferenceFrame, IntensityCurve
from .errors import InputError, ParseError
from .imageio import encode_pnm, write_bytes_atomic
from .manifest import MANIFEST_COLUMNS, ManifestRow, csv_text

REANNOTATION_COLUMNS = MANIFEST_COLUMNS + (
    "onset_re",
    "apex_re",
    "offset_re",
    "rise_peak_diff",
    "fall_peak_diff",
    "degenerate_flag",
)
DEVIATION_COLUMNS = ("sample_id", "group", "seq_len", "fps") + tuple(
    f"{k}_{m}" for k in KEYFRAMES for m in ("d_frames", "d_signed", "d_pct", "d_ms")
) + ("mean_d_pct", "mean_d_ms")
SWEEP_COLUMNS = ("group", "lambda", "mean_d_pct", "mean_d_ms", "n_samples")
CURVE_COLUMNS = ("frame_index", "value")


def fmt(x: float) -> str:
    return format(float(x), ".6g")


def write_text(path: Path, text: str) -> Path:
    try:
        write_bytes_atomic(path, text.encode("utf-8"))
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc
    return path


def write_json(path: Path, obj) -> Path:
    return write_text(path, json.dumps(obj, indent=2, sort_keys=False) + "\n")


def reannotation_rows(results: Sequence[Tuple[ManifestRow, Reannotation]]) -> List[list]:
    rows = []
    for row, res in results:
        rows.append(
            row.manifest_values()
            + [str(v) for v in row.to_base(res.reselected)]
            + [fmt(res.rise_peak_diff), fmt(res.fall_peak_diff), str(int(res.degenerate))]
        )
    return rows


def write_reannotations(path: Path, results) -> Path:
    return write_text(path, csv_text(REANNOTATION_COLUMNS, reannotation_rows(results)))


def read_reannotations(path) -> Dict[str, Annotation]:
    """Map sample_id to the re-selected annotation (0-based)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != REANNOTATION_COLUMNS:
        raise ParseError(f"{path}: line 1: unexpected reannotation header")
    out = {}
    for line, r in enumerate(reader, start=2):
        try:
            base = int(r["index_base"])
            out[r["sample_id"]] = Annotation(
                *(int(r[k]) - base for k in ("onset_re", "apex_re", "offset_re"))
            )
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: line {line}: {exc}") from None
    return out


def deviation_row(row: ManifestRow, rec: DeviationRecord) -> list:
    vals = [row.sample_id, row.group, str(rec.seq_len), fmt(rec.fps)]
    for e in rec.entries():
        vals += [str(e.d_frames), str(e.signed), fmt(e.d_pct), fmt(e.d_ms)]
    return vals + [fmt(rec.mean_d_pct), fmt(rec.mean_d_ms)]


def deviation_json(row: ManifestRow, rec: DeviationRecord) -> dict:
    d = {"sample_id": row.sample_id, "group": row.group, "seq_len": rec.seq_len, "fps": rec.fps}
    for name, e in zip(KEYFRAMES, rec.entries()):
        d[name] = {"d_frames": e.d_frames, "d_signed": e.signed, "d_pct": e.d_pct, "d_ms": e.d_ms}
    d["mean_d_pct"] = rec.mean_d_pct
    d["mean_d_ms"] = rec.mean_d_ms
    return d


def write_deviations(out_dir: Path, results: Iterable[Tuple[ManifestRow, DeviationRecord]]) -> List[Path]:
    results = list(results)
    csv_path = write_text(
        out_dir / "deviations.csv",
        csv_text(DEVIATION_COLUMNS, (deviation_row(r, d) for r, d in results)),
    )
    json_path = write_json(out_dir / "deviations.json", [deviation_json(r, d) for r, d in results])
    return [csv_path, json_path]


def write_sweep(out_dir: Path, report: SweepReport) -> List[Path]:
    rows = report.rows()
    table = [
        [r["group"], fmt(r["lambda"]), fmt(r["mean_d_pct"]), fmt(r["mean_d_ms"]), str(r["n_samples"])]
        for r in rows
    ]
    return [
        write_text(out_dir / "sweep.csv", csv_text(SWEEP_COLUMNS, table)),
        write_json(out_dir / "sweep.json", rows),
    ]


def write_curve(path: Path, curve: IntensityCurve) -> Path:
    return write_text(path, csv_text(CURVE_COLUMNS, ([str(i), fmt(v)] for i, v in enumerate(curve.values))))


def difference_grid_text(diff: DifferenceFrame) -> str:
    """Numeric grid, one image row per CSV row; colour channels are
    written as consecutive columns per pixel."""
    v = diff.values
    flat = v.reshape(v.shape[0], -1)
    return csv_text([f"c{j}" for j in range(flat.shape[1])], ([repr(float(x)) for x in r] for r in flat))


def write_difference(out_dir: Path, stem: str, diff: DifferenceFrame) -> List[Path]:
    grid = write_text(out_dir / f"{stem}.csv", difference_grid_text(diff))
    pgm = out_dir / f"{stem}.{'pgm' if diff.channels == 1 else 'ppm'}"
    try:
        write_bytes_atomic(pgm, encode_pnm(diff.to_uint8()))
    except OSError as exc:
        raise InputError(f"cannot write {pgm}: {exc}") from exc
    return [grid, pgm]
