"""Inter-annotator agreement: Cohen's and Fleiss' kappa at token and span level.

Token items label every token O/S/K/SK (SK when covered by both a skill and
a knowledge span, so nesting is honored). Span items are the union of exact
(sentence, start, end) triples proposed by any annotator, judged binary
marked/unmarked with the span type ignored. Items no annotator marks do not
exist at span level, which biases chance agreement; this is inherent to the
construction and documented rather than corrected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Corpus
from .errors import InputError

TOKEN_CATEGORIES = ("O", "S", "K", "SK")
LEVELS = ("token", "span")


@dataclass(frozen=True)
class AnnotatorView:
    """One annotator's spans over the shared corpus (their own parsed copy)."""

    annotator_id: str
    corpus: Corpus


def _check_shared(views: Sequence[AnnotatorView]) -> Corpus:
    base = views[0].corpus
    base_sent = tuple(p.sentences for p in base.postings)
    base_ids = tuple(p.id for p in base.postings)
    for v in views[1:]:
        ids = tuple(p.id for p in v.corpus.postings)
        if ids != base_ids or tuple(p.sentences for p in v.corpus.postings) != base_sent:
            raise InputError(
                f"annotator {v.annotator_id!r} is not over the same corpus as"
                f" {views[0].annotator_id!r}"
            )
    return base


def _token_labels(view: AnnotatorView) -> np.ndarray:
    """Category id per token, in corpus order. 0=O, 1=S, 2=K, 3=SK."""
    offsets: dict[tuple[str, int], int] = {}
    total = 0
    for p in view.corpus.postings:
        for si, sent in enumerate(p.sentences):
            offsets[(p.id, si)] = total
            total += len(sent)
    labels = np.zeros(total, dtype=np.int64)
    for sp in view.corpus.spans:
        base = offsets[(sp.posting_id, sp.sentence_index)]
        bit = 1 if sp.kind == "SKILL" else 2
        labels[base + sp.start : base + sp.end] |= bit
    return labels


def _span_universe(views: Sequence[AnnotatorView]) -> list[tuple[str, int, int, int]]:
    items = set()
    for v in views:
        for sp in v.corpus.spans:
            items.add((sp.posting_id, sp.sentence_index, sp.start, sp.end))
    return sorted(items)


def _span_marks(view: AnnotatorView, universe: Sequence[tuple]) -> np.ndarray:
    mine = {
        (sp.posting_id, sp.sentence_index, sp.start, sp.end) for sp in view.corpus.spans
    }
    return np.array([1 if item in mine else 0 for item in universe], dtype=np.int64)


def _item_vectors(views: Sequence[AnnotatorView], level: str) -> tuple[np.ndarray, int]:
    """Stacked per-annotator category vectors plus the category count."""
    if level not in LEVELS:
        raise InputError(f"level must be one of {LEVELS}, got {level!r}")
    _check_shared(views)
    if level == "token":
        vecs = np.stack([_token_labels(v) for v in views])
        return vecs, len(TOKEN_CATEGORIES)
    universe = _span_universe(views)
    if not universe:
        raise InputError("no spans proposed by any annotator: span-level items are empty")
    vecs = np.stack([_span_marks(v, universe) for v in views])
    return vecs, 2


def _finish_kappa(p_o: float, p_e: float) -> float:
    if p_e >= 1.0:
        if p_o >= 1.0:
            return 1.0
        raise InputError("undefined kappa: chance agreement is 1 with imperfect observed agreement")
    return (p_o - p_e) / (1.0 - p_e)


def cohen_kappa(a: AnnotatorView, b: AnnotatorView, level: str = "token") -> float:
    """Chance-corrected pairwise agreement.

    Chance uses the product of the two annotators' marginal label
    distributions. Returns a value in [-1, 1].
    """
    vecs, n_cat = _item_vectors([a, b], level)
    va, vb = vecs[0], vecs[1]
    if va.size == 0:
        raise InputError("no items to compare")
    p_o = float(np.mean(va == vb))
    pa = np.bincount(va, minlength=n_cat) / va.size
    pb = np.bincount(vb, minlength=n_cat) / vb.size
    p_e = float(pa @ pb)
    return _finish_kappa(p_o, p_e)


def fleiss_kappa(views: Sequence[AnnotatorView], level: str = "token") -> float:
    """Multi-annotator generalization; chance uses pooled category proportions."""
    if len(views) < 2:
        raise InputError(f"fleiss kappa needs at least 2 annotators, got {len(views)}")
    vecs, n_cat = _item_vectors(views, level)
    n_annot, n_items = vecs.shape
    if n_items == 0:
        raise InputError("no items to compare")
    votes = np.zeros((n_items, n_cat), dtype=np.int64)
    for row in vecs:
        votes[np.arange(n_items), row] += 1
    per_item = (np.sum(votes * votes, axis=1) - n_annot) / (n_annot * (n_annot - 1))
    p_bar = float(np.mean(per_item))
    proportions = votes.sum(axis=0) / (n_items * n_annot)
    p_e = float(proportions @ proportions)
    return _finish_kappa(p_bar, p_e)
