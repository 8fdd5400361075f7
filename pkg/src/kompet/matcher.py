"""Fuzzy matching of span surfaces against taxonomy concepts.

Retrieval scores concepts by character-trigram Jaccard overlap (an offline
stand-in for a relevance-ranked search API); the best match is then chosen
by minimum Levenshtein distance over the candidate list, returning early on
a perfect match and keeping the earliest candidate on ties.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import _kernels
from .errors import InputError
from .taxonomy import TaxonomyConcept, TaxonomyIndex, labels_for, normalize_text, trigrams

# Concept kinds admitted per span kind. Language concepts pass both filters:
# they are filed under L1 but classify as knowledge components.
KINDS_FOR_SPAN = {
    "SKILL": frozenset({"skill", "attitude", "language"}),
    "KNOWLEDGE": frozenset({"knowledge", "language"}),
}


def concept_kinds_for(span_kind: str) -> frozenset[str]:
    try:
        return KINDS_FOR_SPAN[span_kind.upper()]
    except KeyError:
        raise InputError(f"unknown span kind {span_kind!r}") from None


@dataclass(frozen=True)
class MatchResult:
    """Best candidate for a query: concept, distance, and the label that won."""

    concept: TaxonomyConcept
    distance: int
    matched_label: str

    @property
    def perfect(self) -> bool:
        return self.distance == 0


def levenshtein(a: str, b: str) -> int:
    """Minimum insertions/deletions/substitutions over Unicode scalar values."""
    return _kernels.lev_pair(_kernels.encode(a), _kernels.encode(b))


def levenshtein_matrix(a: Sequence[str], b: Sequence[str]):
    """All-pairs distance matrix, shape (len(a), len(b)); int64 ndarray."""
    return _kernels.lev_matrix([_kernels.encode(s) for s in a], [_kernels.encode(s) for s in b])


def jaccard(a: frozenset, b: frozenset) -> float:
    if not a and not b:
        return 0.0
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return inter / (len(a) + len(b) - inter)


def retrieve_candidates(
    query: str,
    span_kind: str,
    index: TaxonomyIndex,
    k: int = 100,
) -> list[TaxonomyConcept]:
    """Top-k concepts by trigram overlap with the query, kind filter first.

    A concept scores as its best label's Jaccard; ties break by code order.
    Concepts sharing no trigram with the query never appear.
    """
    if k < 1:
        raise InputError(f"k must be positive, got {k}")
    allowed = concept_kinds_for(span_kind)
    grams = trigrams(normalize_text(query))
    if not grams:
        return []
    codes: set[str] = set()
    for g in grams:
        codes.update(index.postings(g))
    scored = []
    for code in codes:
        concept = index.get(code)
        if concept.kind not in allowed:
            continue
        score = max(jaccard(grams, gs) for gs in index.label_grams(code))
        if score > 0.0:
            scored.append((-score, code))
    scored.sort()
    return [index.get(code) for _, code in scored[:k]]


def fetch_skill(
    query: str,
    span_kind: str,
    candidates: Sequence[TaxonomyConcept],
    language: str | None = None,
) -> MatchResult | None:
    """Best match over candidates by Levenshtein distance, in candidate order.

    Per candidate the distance is the minimum over its labels (preferred
    first, then alternates). A zero distance returns immediately; otherwise
    the first candidate achieving the running strict minimum is kept. An
    empty candidate list yields None.
    """
    allowed = concept_kinds_for(span_kind)
    q = normalize_text(query)
    q_codes = _kernels.encode(q)
    best: MatchResult | None = None
    for concept in candidates:
        if concept.kind not in allowed:
            continue
        cand_dist = None
        cand_label = None
        for label in labels_for(concept, language):
            d = _kernels.lev_pair(q_codes, _kernels.encode(normalize_text(label)))
            if d == 0:
                return MatchResult(concept=concept, distance=0, matched_label=label)
            if cand_dist is None or d < cand_dist:
                cand_dist = d
                cand_label = label
        if cand_dist is not None and (best is None or cand_dist < best.distance):
            best = MatchResult(concept=concept, distance=cand_dist, matched_label=cand_label)
    return best
