"""Span-annotated job-posting corpora: parsing, statistics, splits.

The corpus file is JSON-lines, one posting per line; spans use 0-based token
offsets with an exclusive end and may nest or overlap freely.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import InputError
from .taxonomy import is_coarse_tag

SPAN_KINDS = ("SKILL", "KNOWLEDGE")


@dataclass(frozen=True)
class JobPosting:
    id: str
    lang: str
    sentences: tuple[tuple[str, ...], ...]


@dataclass(frozen=True)
class SpanRecord:
    """One annotated span; surface is the space-joined token range."""

    span_id: str
    posting_id: str
    sentence_index: int
    start: int
    end: int
    kind: str
    surface: str
    label: str | None = None


@dataclass(frozen=True)
class Corpus:
    postings: tuple[JobPosting, ...]
    spans: tuple[SpanRecord, ...]

    def posting_ids(self) -> list[str]:
        return [p.id for p in self.postings]

    def get_posting(self, posting_id: str) -> JobPosting:
        for p in self.postings:
            if p.id == posting_id:
                return p
        raise InputError(f"unknown posting id {posting_id!r}")


@dataclass(frozen=True)
class StatsReport:
    """Corpus statistics; per-kind length stats are None for empty kinds."""

    posts: int
    sentences: int
    tokens: int
    skill_spans: int
    knowledge_spans: int
    skill_mean: float | None
    knowledge_mean: float | None
    skill_median: int | None
    knowledge_median: int | None
    skill_p90: tuple[int, int] | None
    knowledge_p90: tuple[int, int] | None

    def to_dict(self) -> dict:
        return {
            "posts": self.posts,
            "sentences": self.sentences,
            "tokens": self.tokens,
            "skill_spans": self.skill_spans,
            "knowledge_spans": self.knowledge_spans,
            "skill_mean": self.skill_mean,
            "knowledge_mean": self.knowledge_mean,
            "skill_median": self.skill_median,
            "knowledge_median": self.knowledge_median,
            "skill_p90": list(self.skill_p90) if self.skill_p90 else None,
            "knowledge_p90": list(self.knowledge_p90) if self.knowledge_p90 else None,
        }


def span_id(posting_id: str, ordinal: int) -> str:
    return f"{posting_id}:{ordinal}"


def _nfc(s: str) -> str:
    return unicodedata.normalize("NFC", s)


def _parse_posting_line(obj: dict, lineno: int) -> tuple[JobPosting, list[SpanRecord]]:
    if not isinstance(obj, dict):
        raise InputError(f"line {lineno}: posting must be a JSON object")
    pid = obj.get("id")
    if not isinstance(pid, str) or not pid:
        raise InputError(f"line {lineno}: missing or empty posting id")
    pid = _nfc(pid)
    lang = obj.get("lang")
    if not isinstance(lang, str) or not lang:
        raise InputError(f"line {lineno}: posting {pid!r}: missing lang")
    raw_sents = obj.get("sentences")
    if not isinstance(raw_sents, list):
        raise InputError(f"line {lineno}: posting {pid!r}: sentences must be a list")
    sentences = []
    for si, s in enumerate(raw_sents):
        toks = s.get("tokens") if isinstance(s, dict) else None
        if not isinstance(toks, list) or not toks:
            raise InputError(f"line {lineno}: posting {pid!r}: sentence {si} empty or malformed")
        if not all(isinstance(t, str) and t for t in toks):
            raise InputError(f"line {lineno}: posting {pid!r}: sentence {si} has empty tokens")
        sentences.append(tuple(_nfc(t) for t in toks))
    posting = JobPosting(id=pid, lang=lang, sentences=tuple(sentences))
    spans = []
    for oi, sp in enumerate(obj.get("spans") or []):
        if not isinstance(sp, dict):
            raise InputError(f"line {lineno}: posting {pid!r}: span {oi} malformed")
        sid = sp.get("sid")
        start = sp.get("start")
        end = sp.get("end")
        kind = sp.get("kind")
        label = sp.get("label")
        if not isinstance(sid, int) or not 0 <= sid < len(sentences):
            raise InputError(f"line {lineno}: posting {pid!r}: span {oi} has bad sentence index {sid!r}")
        ntok = len(sentences[sid])
        if not isinstance(start, int) or not isinstance(end, int):
            raise InputError(f"line {lineno}: posting {pid!r}: span {oi} has non-integer bounds")
        if not 0 <= start < end <= ntok:
            raise InputError(
                f"line {lineno}: posting {pid!r}: span {oi} out of bounds"
                f" (start {start}, end {end}, sentence length {ntok})"
            )
        if kind not in SPAN_KINDS:
            raise InputError(f"line {lineno}: posting {pid!r}: span {oi} has unknown kind {kind!r}")
        if label is not None:
            if not isinstance(label, str) or not is_coarse_tag(_nfc(label)):
                raise InputError(
                    f"line {lineno}: posting {pid!r}: span {oi} has unknown label tag {label!r}"
                )
            label = _nfc(label)
        spans.append(
            SpanRecord(
                span_id=span_id(pid, oi),
                posting_id=pid,
                sentence_index=sid,
                start=start,
                end=end,
                kind=kind,
                surface=" ".join(sentences[sid][start:end]),
                label=label,
            )
        )
    return posting, spans


def parse_corpus(source: str | Path | IO[str]) -> Corpus:
    """Parse a corpus file; ordering follows the file, all invariants checked."""
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    postings: list[JobPosting] = []
    spans: list[SpanRecord] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {lineno}: malformed JSON ({exc.msg})") from None
        posting, posting_spans = _parse_posting_line(obj, lineno)
        if posting.id in seen:
            raise InputError(
                f"line {lineno}: duplicate posting id {posting.id!r}"
                f" (first seen on line {seen[posting.id]})"
            )
        seen[posting.id] = lineno
        postings.append(posting)
        spans.extend(posting_spans)
    return Corpus(postings=tuple(postings), spans=tuple(spans))


def write_corpus(corpus: Corpus, dest: str | Path | IO[str]) -> None:
    by_posting: dict[str, list[SpanRecord]] = {p.id: [] for p in corpus.postings}
    for sp in corpus.spans:
        by_posting[sp.posting_id].append(sp)
    own = not hasattr(dest, "write")
    fh = open(dest, "w", encoding="utf-8") if own else dest
    try:
        for p in corpus.postings:
            obj = {
                "id": p.id,
                "lang": p.lang,
                "sentences": [{"tokens": list(s)} for s in p.sentences],
                "spans": [
                    {
                        "sid": sp.sentence_index,
                        "start": sp.start,
                        "end": sp.end,
                        "kind": sp.kind,
                        "label": sp.label,
                    }
                    for sp in by_posting[p.id]
                ],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")
    finally:
        if own:
            fh.close()


def _median_lower(sorted_lengths: Sequence[int]) -> int:
    # Lower-middle element for even counts, matching integer medians in use.
    return sorted_lengths[(len(sorted_lengths) - 1) // 2]


def _p90_upper(sorted_lengths: Sequence[int]) -> int:
    # Nearest-rank: smallest length with >= 90% of spans at or below it.
    n = len(sorted_lengths)
    rank = -((-9 * n) // 10)  # ceil(0.9 * n) in exact integer arithmetic
    return sorted_lengths[rank - 1]


def corpus_stats(corpus: Corpus) -> StatsReport:
    """Counts plus per-kind mean/median/90th-percentile span lengths."""
    skill = sorted(sp.end - sp.start for sp in corpus.spans if sp.kind == "SKILL")
    knowledge = sorted(sp.end - sp.start for sp in corpus.spans if sp.kind == "KNOWLEDGE")

    def mean(xs):
        return sum(xs) / len(xs) if xs else None

    return StatsReport(
        posts=len(corpus.postings),
        sentences=sum(len(p.sentences) for p in corpus.postings),
        tokens=sum(len(s) for p in corpus.postings for s in p.sentences),
        skill_spans=len(skill),
        knowledge_spans=len(knowledge),
        skill_mean=mean(skill),
        knowledge_mean=mean(knowledge),
        skill_median=_median_lower(skill) if skill else None,
        knowledge_median=_median_lower(knowledge) if knowledge else None,
        skill_p90=(1, _p90_upper(skill)) if skill else None,
        knowledge_p90=(1, _p90_upper(knowledge)) if knowledge else None,
    )


def split_corpus(
    corpus: Corpus, sizes: tuple[int, int, int], seed: int
) -> tuple[list[str], list[str], list[str]]:
    """Deterministic train/dev/test partition of posting ids.

    Posting ids are shuffled with a seeded generator and split by prefix;
    the three lists are disjoint and jointly exhaustive.
    """
    ids = corpus.posting_ids()
    if any(s < 0 for s in sizes):
        raise InputError(f"split sizes must be non-negative, got {sizes}")
    if sum(sizes) != len(ids):
        raise InputError(
            f"split sizes {sizes} sum to {sum(sizes)}, corpus has {len(ids)} postings"
        )
    perm = np.random.default_rng(seed).permutation(len(ids))
    shuffled = [ids[i] for i in perm]
    train_n, dev_n, _ = sizes
    return (
        shuffled[:train_n],
        shuffled[train_n : train_n + dev_n],
        shuffled[train_n + dev_n :],
    )


def spans_of_posting(corpus: Corpus, posting_id: str) -> list[SpanRecord]:
    return [sp for sp in corpus.spans if sp.posting_id == posting_id]


def sibling_spans(corpus: Corpus, span: SpanRecord) -> list[SpanRecord]:
    """Other spans sharing the span's sentence (for nested-span rendering)."""
    return [
        sp
        for sp in corpus.spans
        if sp.posting_id == span.posting_id
        and sp.sentence_index == span.sentence_index
        and sp.span_id != span.span_id
    ]
