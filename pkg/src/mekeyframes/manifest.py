"""Corpus manifests: one CSV row per sample pointing at its frame files."""

from __future__ import annotations

import csv
import glob
import io
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .core import Annotation, Frame, FrameSequence, validate_annotation
from .errors import InputError, InvalidAnnotation, MissingFrames, ParseError
from .imageio import load_frame, resize, write_bytes_atomic

MANIFEST_COLUMNS = (
    "sample_id",
    "subject_id",
    "label",
    "group",
    "fps",
    "index_base",
    "onset",
    "apex",
    "offset",
    "frame_pattern",
)
IMAGE_SUFFIXES = (".pgm", ".ppm", ".png")


@dataclass(frozen=True)
class ManifestRow:
    """One sample.  ``annotation`` is always 0-based; ``index_base`` records
    the base used in the file so that writing it back is lossless."""

    sample_id: str
    subject_id: str
    label: str
    group: str
    fps: float
    index_base: int
    annotation: Annotation
    frame_pattern: str
    root: Path = Path(".")
    frame_paths: Tuple[Path, ...] = field(default=(), compare=False)

    @property
    def seq_len(self) -> int:
        return len(self.frame_paths)

    def to_base(self, ann: Annotation) -> Tuple[int, int, int]:
        b = self.index_base
        return (ann.onset + b, ann.apex + b, ann.offset + b)

    def load_sequence(self, keep_color: bool = False, size: Optional[Tuple[int, int]] = None,
                      resize_method: str = "nearest") -> FrameSequence:
        frames = []
        for p in self.frame_paths:
            f = load_frame(p, keep_color=keep_color)
            if size is not None:
                f = Frame(resize(f.pixels, size[0], size[1], resize_method))
            frames.append(f)
        return FrameSequence(tuple(frames), self.fps, sample_id=self.sample_id,
                             subject_id=self.subject_id, label=self.label or None)

    def manifest_values(self) -> List[str]:
        return [
            self.sample_id,
            self.subject_id,
            self.label,
            self.group,
            format_fps(self.fps),
            str(self.index_base),
            *(str(v) for v in self.to_base(self.annotation)),
            self.frame_pattern,
        ]


def format_fps(fps: float) -> str:
    # repr round-trips exactly; integral rates print without a trailing ".0"
    return str(int(fps)) if float(fps).is_integer() else repr(float(fps))


def resolve_frames(root: Path, pattern: str) -> Tuple[Path, ...]:
    """Frame files for ``pattern`` (a directory or a glob relative to
    ``root``), sorted lexicographically."""
    target = root / pattern
    if target.is_dir():
        paths = [p for p in target.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES]
    else:
        paths = [Path(p) for p in glob.glob(str(target))]
        paths = [p for p in paths if p.is_file()]
    return tuple(sorted(paths, key=lambda p: str(p)))


def _int_field(row: dict, name: str, line: int) -> int:
    raw = row[name].strip()
    try:
        return int(raw)
    except ValueError:
        raise ParseError(f"line {line}: {name} must be an integer, got {raw!r}") from None


def parse_manifest_text(text: str, root: Path, resolve: bool = True) -> List[ManifestRow]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError("line 1: manifest is empty") from None
    if tuple(h.strip() for h in header) != MANIFEST_COLUMNS:
        raise ParseError(f"line 1: expected header {','.join(MANIFEST_COLUMNS)}")
    rows: List[ManifestRow] = []
    seen = set()
    missing = []
    for line, values in enumerate(reader, start=2):
        if not values or all(not v.strip() for v in values):
            continue
        if len(values) != len(MANIFEST_COLUMNS):
            raise ParseError(f"line {line}: expected {len(MANIFEST_COLUMNS)} fields, got {len(values)}")
        row = dict(zip(MANIFEST_COLUMNS, values))
        sid = row["sample_id"].strip()
        if not sid:
            raise ParseError(f"line {line}: empty sample_id")
        if sid in seen:
            raise ParseError(f"line {line}: duplicate sample_id {sid!r}")
        seen.add(sid)
        try:
            fps = float(row["fps"])
        except ValueError:
            raise ParseError(f"line {line}: fps must be a number, got {row['fps']!r}") from None
        if not (math.isfinite(fps) and fps > 0):
            raise ParseError(f"line {line}: fps must be > 0, got {row['fps']!r}")
        base = _int_field(row, "index_base", line)
        if base not in (0, 1):
            raise ParseError(f"line {line}: index_base must be 0 or 1, got {base}")
        idx = [_int_field(row, k, line) - base for k in ("onset", "apex", "offset")]
        pattern = row["frame_pattern"].strip()
        paths = resolve_frames(root, pattern) if resolve else ()
        if resolve and not paths:
            missing.append(f"{sid}: {pattern}")
        rows.append(
            ManifestRow(
                sample_id=sid,
                subject_id=row["subject_id"].strip(),
                label=row["label"].strip(),
                group=row["group"].strip(),
                fps=fps,
                index_base=base,
                annotation=Annotation(*idx),
                frame_pattern=pattern,
                root=root,
                frame_paths=paths,
            )
        )
    if missing:
        raise MissingFrames("no frames found for " + "; ".join(missing))
    if resolve:
        for r in rows:
            try:
                validate_annotation(r.annotation, r.seq_len)
            except InputError as exc:
                raise InvalidAnnotation(f"sample {r.sample_id!r}: {exc}") from exc
    return rows


def load_manifest(path, resolve: bool = True) -> List[ManifestRow]:
    """Read a manifest CSV; frames are located but not decoded."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc
    return parse_manifest_text(text, path.parent, resolve=resolve)


def csv_text(header: Sequence[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def write_manifest(rows: Sequence[ManifestRow], path) -> None:
    write_bytes_atomic(path, csv_text(MANIFEST_COLUMNS, (r.manifest_values() for r in rows)).encode())


def with_annotation(row: ManifestRow, ann: Annotation) -> ManifestRow:
    return replace(row, annotation=ann)
