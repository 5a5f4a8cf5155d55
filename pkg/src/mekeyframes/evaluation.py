"""Recognition metrics (accuracy, UF1, UAR) and leave-one-subject-out splits."""

from __future__ import annotations

from collections import OrderedDict
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import EmptyMatrix, InputError, SingleSubject, UnknownClass


@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    class_names: Tuple[str, ...]
    counts: np.ndarray

    def __post_init__(self):
        names = tuple(self.class_names)
        if len(names) < 2:
            raise InputError("a confusion matrix needs at least 2 classes")
        if len(set(names)) != len(names):
            raise InputError(f"duplicate class names in {names}")
        counts = np.array(self.counts, dtype=np.int64, copy=True)
        if counts.shape != (len(names), len(names)):
            raise InputError(f"counts shape {counts.shape} does not match {len(names)} classes")
        if (counts < 0).any():
            raise InputError("counts must be nonnegative")
        counts.setflags(write=False)
        object.__setattr__(self, "class_names", names)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def empty(cls, class_names: Sequence[str]) -> "ConfusionMatrix":
        n = len(class_names)
        return cls(tuple(class_names), np.zeros((n, n), dtype=np.int64))

    @classmethod
    def from_labels(cls, class_names, pairs: Iterable[Tuple[str, str]]) -> "ConfusionMatrix":
        cm = cls.empty(class_names)
        index = {c: i for i, c in enumerate(cm.class_names)}
        counts = np.zeros_like(cm.counts)
        for t, p in pairs:
            if t not in index or p not in index:
                raise UnknownClass(f"unknown class in ({t!r}, {p!r})")
            counts[index[t], index[p]] += 1
        return cls(cm.class_names, counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def __eq__(self, other):
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return self.class_names == other.class_names and np.array_equal(self.counts, other.counts)

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.class_names != other.class_names:
            raise InputError("cannot merge matrices with different classes")
        return ConfusionMatrix(self.class_names, self.counts + other.counts)


def accumulate(cm: ConfusionMatrix, true_label: str, predicted: str) -> ConfusionMatrix:
    try:
        i = cm.class_names.index(true_label)
        j = cm.class_names.index(predicted)
    except ValueError:
        raise UnknownClass(f"unknown class in ({true_label!r}, {predicted!r})") from None
    counts = cm.counts.copy()
    counts[i, j] += 1
    return ConfusionMatrix(cm.class_names, counts)


def _tp_fp_fn(cm: ConfusionMatrix):
    if cm.total < 1:
        raise EmptyMatrix("confusion matrix has no counts")
    c = cm.counts.astype(np.float64)
    tp = np.diag(c)
    fp = c.sum(axis=0) - tp
    fn = c.sum(axis=1) - tp
    return tp, fp, fn


def _safe_ratio(num, den):
    out = np.zeros_like(num)
    np.divide(num, den, out=out, where=den > 0)
    return out


def per_class_f1(cm: ConfusionMatrix, as_printed: bool = False) -> np.ndarray:
    """Per-class F1; a class with no true, predicted or correct samples scores 0.

    ``as_printed`` uses ``2TP / (TP + FP + FN)``, a variant that circulates in
    the literature and can exceed 1; kept for side-by-side comparison only.
    """
    tp, fp, fn = _tp_fp_fn(cm)
    den = (tp + fp + fn) if as_printed else (2 * tp + fp + fn)
    return _safe_ratio(2 * tp, den)


def per_class_recall(cm: ConfusionMatrix) -> np.ndarray:
    tp, _, fn = _tp_fp_fn(cm)
    return _safe_ratio(tp, tp + fn)


def uf1(cm: ConfusionMatrix, as_printed: bool = False) -> float:
    f1 = per_class_f1(cm, as_printed)
    return float(f1.sum() / len(f1))


def uar(cm: ConfusionMatrix) -> float:
    r = per_class_recall(cm)
    return float(r.sum() / len(r))


def accuracy(cm: ConfusionMatrix) -> float:
    if cm.total < 1:
        raise EmptyMatrix("confusion matrix has no counts")
    return float(np.trace(cm.counts) / cm.total)


def metrics_report(cm: ConfusionMatrix, as_printed: bool = False) -> dict:
    f1 = per_class_f1(cm, as_printed)
    rec = per_class_recall(cm)
    return {
        "acc": accuracy(cm),
        "uf1": uf1(cm, as_printed),
        "uar": uar(cm),
        "per_class": {
            name: {"f1": float(f1[i]), "recall": float(rec[i])}
            for i, name in enumerate(cm.class_names)
        },
    }


@dataclass(frozen=True)
class LosoSplit:
    held_out_subject: str
    train_ids: Tuple[str, ...]
    test_ids: Tuple[str, ...]


def loso_splits(samples: Sequence[Tuple[str, str]]) -> List[LosoSplit]:
    """One split per subject, ordered by subject id; sample order is kept
    inside each split."""
    by_subject: "OrderedDict[str, list]" = OrderedDict()
    seen = set()
    for sample_id, subject_id in samples:
        if sample_id in seen:
            raise InputError(f"duplicate sample id {sample_id!r}")
        seen.add(sample_id)
        by_subject.setdefault(subject_id, []).append(sample_id)
    if len(by_subject) < 2:
        raise SingleSubject("leave-one-subject-out needs at least 2 subjects")
    splits = []
    for subject in sorted(by_subject):
        test = tuple(by_subject[subject])
        train = tuple(s for s, subj in samples if subj != subject)
        splits.append(LosoSplit(subject, train, test))
    return splits
