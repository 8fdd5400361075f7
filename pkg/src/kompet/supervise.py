"""Distant supervision: span surfaces in, silver coarse labels out.

Each span's surface is matched against the taxonomy; unmatched spans fall
back to the field-unknown tag K99 and are flagged missing. Batch runs never
abort on a single span: per-span problems are recorded as diagnostics.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Callable, Iterable, Sequence

from .corpus import SpanRecord
from .errors import InputError, KompetError
from .matcher import MatchResult, fetch_skill, retrieve_candidates
from .taxonomy import (
    MISSING_TAG,
    TaxonomyConcept,
    TaxonomyIndex,
    coarse_label,
    is_coarse_tag,
    tag_sort_key,
)

PROVENANCES = ("silver", "gold", "artifact")


@dataclass(frozen=True)
class LabeledSpan:
    """A span plus its coarse label, match metadata, and diagnostics."""

    span: SpanRecord
    label: str
    provenance: str
    match: MatchResult | None = None
    missing: bool = False
    candidates: int = 0
    error: str | None = None

    @property
    def span_id(self) -> str:
        return self.span.span_id


@dataclass(frozen=True)
class LabeledRow:
    """One line of the silver/gold file format (no token coordinates)."""

    span_id: str
    surface: str
    kind: str
    label: str
    provenance: str
    missing: bool
    match_code: str | None = None
    match_distance: int | None = None


@dataclass(frozen=True)
class QualityAudit:
    total: int
    correct: int
    accuracy: float
    missing: int
    missing_rate: float

    def to_dict(self) -> dict:
        return {
            "total": self.total,
            "correct": self.correct,
            "accuracy": self.accuracy,
            "missing": self.missing,
            "missing_rate": self.missing_rate,
        }


Retriever = Callable[[str, str], Sequence[TaxonomyConcept]]


def distant_label(
    spans: Sequence[SpanRecord],
    index: TaxonomyIndex,
    *,
    k: int = 100,
    retriever: Retriever | None = None,
) -> list[LabeledSpan]:
    """Silver-label spans in input order.

    Candidates come from trigram retrieval over the index unless `retriever`
    (surface, span kind) -> concepts is given (e.g. the live API). A span
    with no usable match gets label K99 and missing=True; coarse-mapping
    failures are captured per span in `error`, never aborting the batch.
    """
    out: list[LabeledSpan] = []
    for span in spans:
        if retriever is not None:
            candidates = retriever(span.surface, span.kind)
        else:
            candidates = retrieve_candidates(span.surface, span.kind, index, k=k)
        result = fetch_skill(span.surface, span.kind, candidates, language=index.language)
        if result is None:
            out.append(
                LabeledSpan(
                    span=span,
                    label=MISSING_TAG,
                    provenance="silver",
                    match=None,
                    missing=True,
                    candidates=len(candidates),
                )
            )
            continue
        try:
            tag = coarse_label(result.concept)
        except KompetError as exc:
            out.append(
                LabeledSpan(
                    span=span,
                    label=MISSING_TAG,
                    provenance="silver",
                    match=None,
                    missing=True,
                    candidates=len(candidates),
                    error=str(exc),
                )
            )
            continue
        out.append(
            LabeledSpan(
                span=span,
                label=tag,
                provenance="silver",
                match=result,
                missing=False,
                candidates=len(candidates),
            )
        )
    return out


def label_distribution(labeled: Iterable) -> dict[str, int]:
    """Histogram of labels, rendered in canonical tag order."""
    counts = Counter(item.label for item in labeled)
    return {tag: counts[tag] for tag in sorted(counts, key=tag_sort_key)}


def _by_span_id(items: Iterable) -> dict[str, object]:
    out = {}
    for item in items:
        sid = item.span_id
        if sid in out:
            raise InputError(f"duplicate span_id {sid!r}")
        out[sid] = item
    return out


def silver_quality(silver: Sequence, gold: Sequence) -> QualityAudit:
    """Accuracy of silver labels against gold, plus the missing rate."""
    s = _by_span_id(silver)
    g = _by_span_id(gold)
    if set(s) != set(g):
        only_s = sorted(set(s) - set(g))[:3]
        only_g = sorted(set(g) - set(s))[:3]
        raise InputError(
            f"span_id mismatch between silver and gold (silver-only {only_s}, gold-only {only_g})"
        )
    if not s:
        raise InputError("empty audit: no spans")
    total = len(s)
    correct = sum(1 for sid in s if s[sid].label == g[sid].label)
    missing = sum(1 for sid in s if s[sid].missing)
    return QualityAudit(
        total=total,
        correct=correct,
        accuracy=correct / total,
        missing=missing,
        missing_rate=missing / total,
    )


def as_row(item: LabeledSpan) -> LabeledRow:
    return LabeledRow(
        span_id=item.span.span_id,
        surface=item.span.surface,
        kind=item.span.kind,
        label=item.label,
        provenance=item.provenance,
        missing=item.missing,
        match_code=item.match.concept.code if item.match else None,
        match_distance=item.match.distance if item.match else None,
    )


def _row_dict(row: LabeledRow) -> dict:
    return {
        "span_id": row.span_id,
        "surface": row.surface,
        "kind": row.kind,
        "label": row.label,
        "provenance": row.provenance,
        "missing": row.missing,
        "match": (
            {"code": row.match_code, "distance": row.match_distance}
            if row.match_code is not None
            else None
        ),
    }


def write_labeled(items: Iterable, dest: str | Path | IO[str]) -> None:
    """Write LabeledSpans or LabeledRows in the silver/gold JSON-lines format."""
    own = not hasattr(dest, "write")
    fh = open(dest, "w", encoding="utf-8") if own else dest
    try:
        for item in items:
            row = as_row(item) if isinstance(item, LabeledSpan) else item
            fh.write(json.dumps(_row_dict(row), ensure_ascii=False, sort_keys=True) + "\n")
    finally:
        if own:
            fh.close()


def read_labeled(source: str | Path | IO[str]) -> list[LabeledRow]:
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    rows: list[LabeledRow] = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {lineno}: malformed JSON ({exc.msg})") from None
        try:
            label = obj["label"]
            if not is_coarse_tag(label):
                raise InputError(f"line {lineno}: unknown label tag {label!r}")
            provenance = obj.get("provenance", "silver")
            if provenance not in PROVENANCES:
                raise InputError(f"line {lineno}: unknown provenance {provenance!r}")
            match = obj.get("match")
            rows.append(
                LabeledRow(
                    span_id=obj["span_id"],
                    surface=obj.get("surface", ""),
                    kind=obj.get("kind", "SKILL"),
                    label=label,
                    provenance=provenance,
                    missing=bool(obj.get("missing", False)),
                    match_code=match["code"] if match else None,
                    match_distance=match.get("distance") if match else None,
                )
            )
        except KeyError as exc:
            raise InputError(f"line {lineno}: missing field {exc}") from None
    return rows
