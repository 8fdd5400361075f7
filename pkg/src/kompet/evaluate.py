"""Classification scoring: per-class P/R/F1, weighted macro-F1, confusion matrices.

The class universe is the union of labels seen in gold or predictions;
prediction-only classes carry zero gold support and thus zero weight.
Zero-denominator precision/recall map to 0 rather than NaN.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from .corpus import SpanRecord
from .errors import InputError
from .supervise import distant_label
from .taxonomy import TaxonomyIndex, tag_sort_key


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    per_class: dict[str, ClassMetrics]
    weighted_macro_f1: float
    accuracy: float
    n: int

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "accuracy": self.accuracy,
            "weighted_macro_f1": self.weighted_macro_f1,
            "per_class": {
                tag: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for tag, m in self.per_class.items()
            },
        }


@dataclass(frozen=True)
class ConfusionMatrix:
    """Gold rows by predicted columns; row normalization optional."""

    labels: tuple[str, ...]
    counts: np.ndarray
    normalization: str

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "normalization": self.normalization,
            "counts": self.counts.tolist(),
        }


def _check_pair(gold: Sequence[str], pred: Sequence[str]) -> None:
    if len(gold) != len(pred):
        raise InputError(f"gold has {len(gold)} labels, pred has {len(pred)}")
    if not gold:
        raise InputError("cannot evaluate zero items")


def _class_universe(gold: Sequence[str], pred: Sequence[str]) -> tuple[str, ...]:
    return tuple(sorted(set(gold) | set(pred), key=tag_sort_key))


def weighted_macro_f1(gold: Sequence[str], pred: Sequence[str]) -> EvalReport:
    """Per-class report and support-weighted macro-F1 over the label union."""
    _check_pair(gold, pred)
    labels = _class_universe(gold, pred)
    tp: Counter = Counter()
    fp: Counter = Counter()
    fn: Counter = Counter()
    support: Counter = Counter()
    hits = 0
    for g, p in zip(gold, pred):
        support[g] += 1
        if g == p:
            tp[g] += 1
            hits += 1
        else:
            fp[p] += 1
            fn[g] += 1
    per_class = {}
    weighted = 0.0
    for c in labels:
        denom_p = tp[c] + fp[c]
        denom_r = tp[c] + fn[c]
        precision = tp[c] / denom_p if denom_p else 0.0
        recall = tp[c] / denom_r if denom_r else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[c] = ClassMetrics(precision=precision, recall=recall, f1=f1, support=support[c])
        weighted += support[c] * f1
    n = len(gold)
    return EvalReport(
        per_class=per_class,
        weighted_macro_f1=weighted / n,
        accuracy=hits / n,
        n=n,
    )


def confusion_matrix(
    gold: Sequence[str], pred: Sequence[str], normalization: str = "none"
) -> ConfusionMatrix:
    if normalization not in ("none", "row"):
        raise InputError(f"normalization must be 'none' or 'row', got {normalization!r}")
    _check_pair(gold, pred)
    labels = _class_universe(gold, pred)
    pos = {c: i for i, c in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for g, p in zip(gold, pred):
        counts[pos[g], pos[p]] += 1
    if normalization == "row":
        sums = counts.sum(axis=1, keepdims=True)
        normed = np.divide(counts, sums, where=sums > 0, out=np.zeros(counts.shape))
        return ConfusionMatrix(labels=labels, counts=normed, normalization="row")
    return ConfusionMatrix(labels=labels, counts=counts, normalization="none")


def baseline_predict(
    spans: Sequence[SpanRecord],
    mode: str,
    *,
    histogram: dict[str, int] | None = None,
    index: TaxonomyIndex | None = None,
    k: int = 100,
) -> list[str]:
    """Trivial classifiers: constant majority label, or the distant matcher."""
    if mode == "majority":
        if not histogram:
            raise InputError("majority baseline needs a non-empty training histogram")
        best_count = max(histogram.values())
        # Ties break by canonical tag order.
        tied = sorted(
            (tag for tag, cnt in histogram.items() if cnt == best_count), key=tag_sort_key
        )
        return [tied[0]] * len(spans)
    if mode == "matcher":
        if index is None:
            raise InputError("matcher baseline needs a taxonomy index")
        return [item.label for item in distant_label(spans, index, k=k)]
    raise InputError(f"unknown baseline mode {mode!r}")


def read_predictions(source: str | Path | IO[str]) -> list[dict]:
    """Read a predictions file: TSV with header span_id/gold/pred, or JSON-lines."""
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    lines = text.splitlines()
    rows: list[dict] = []
    if not lines:
        return rows
    first = lines[0].lstrip()
    if first.startswith("{"):
        for lineno, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"line {lineno}: malformed JSON ({exc.msg})") from None
            missing = {"span_id", "pred"} - set(obj)
            if missing:
                raise InputError(f"line {lineno}: missing fields {sorted(missing)}")
            rows.append({"span_id": obj["span_id"], "gold": obj.get("gold"), "pred": obj["pred"]})
        return rows
    header = lines[0].rstrip("\n").split("\t")
    try:
        idx = {name: header.index(name) for name in ("span_id", "pred")}
    except ValueError:
        raise InputError("predictions TSV must have a header with span_id and pred") from None
    gold_idx = header.index("gold") if "gold" in header else None
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split("\t")
        if len(cells) < len(header):
            raise InputError(f"line {lineno}: expected {len(header)} columns, got {len(cells)}")
        rows.append(
            {
                "span_id": cells[idx["span_id"]],
                "gold": cells[gold_idx] if gold_idx is not None else None,
                "pred": cells[idx["pred"]],
            }
        )
    return rows


def join_gold(
    predictions: list[dict], gold_rows: Sequence
) -> tuple[list[str], list[str]]:
    """Join predictions with gold labels on span_id (gold file wins)."""
    gold_by_id = {row.span_id: row.label for row in gold_rows}
    gold: list[str] = []
    pred: list[str] = []
    for p in predictions:
        sid = p["span_id"]
        if sid not in gold_by_id:
            raise InputError(f"prediction for unknown span_id {sid!r}")
        gold.append(gold_by_id[sid])
        pred.append(p["pred"])
    return gold, pred
