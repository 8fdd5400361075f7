"""ESCO-style taxonomy snapshots: loading, validation, coarse labels, live lookup.

A snapshot is a JSON-lines file with one concept per line (see README for the
schema). Loading builds an immutable :class:`TaxonomyIndex` whose character
trigram postings drive offline candidate retrieval in :mod:`kompet.matcher`.
"""

from __future__ import annotations

import json
import re
import threading
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

import requests

from .errors import ApiError, InputError

CONCEPT_KINDS = ("skill", "knowledge", "attitude", "language")

# Coarse tags in their canonical (rendering) order. 0000, K? and S? are
# pass-through artifact tags: accepted on input files, never produced here.
COARSE_TAGS = (
    "0000",
    "A1",
    "A2",
    "K00",
    "K01",
    "K02",
    "K03",
    "K04",
    "K05",
    "K06",
    "K07",
    "K08",
    "K09",
    "K10",
    "K99",
    "L1",
    "S1",
    "S2",
    "S3",
    "S4",
    "S5",
    "S6",
    "S7",
    "S8",
    "K?",
    "S?",
)
ARTIFACT_TAGS = ("0000", "K?", "S?")
MISSING_TAG = "K99"

_TAG_ORDER = {tag: i for i, tag in enumerate(COARSE_TAGS)}


def is_coarse_tag(tag: str) -> bool:
    return tag in _TAG_ORDER


def tag_sort_key(tag: str):
    """Sort key putting known tags in canonical order, unknown ones last."""
    return (0, _TAG_ORDER[tag], "") if tag in _TAG_ORDER else (1, 0, tag)


def normalize_text(s: str) -> str:
    """NFC-normalize and lowercase; diacritics are preserved."""
    return unicodedata.normalize("NFC", s).lower()


def trigrams(s: str) -> frozenset[str]:
    """Character trigrams of a string; strings shorter than 3 gram to themselves."""
    if len(s) >= 3:
        return frozenset(s[i : i + 3] for i in range(len(s) - 2))
    if s:
        return frozenset((s,))
    return frozenset()


@dataclass(frozen=True)
class TaxonomyConcept:
    """One taxonomy entry: code, kind, per-language labels, parent link."""

    code: str
    uri: str
    kind: str
    preferred_label: dict[str, str]
    alt_labels: dict[str, list[str]] = field(default_factory=dict)
    description: str | None = None
    parent_code: str | None = None


def labels_for(concept: TaxonomyConcept, language: str | None = None) -> tuple[str, ...]:
    """Labels of a concept, preferred first, then alternates.

    With a language, only that language's labels are returned; otherwise all
    languages contribute, in sorted language-tag order (deterministic).
    """
    out: list[str] = []
    if language is not None:
        pref = concept.preferred_label.get(language)
        if pref:
            out.append(pref)
        out.extend(concept.alt_labels.get(language, ()))
    else:
        for lang in sorted(concept.preferred_label):
            out.append(concept.preferred_label[lang])
        for lang in sorted(concept.alt_labels):
            out.extend(concept.alt_labels[lang])
    return tuple(out)


_LETTER_GROUP = re.compile(r"^([SAL]\d+)(?:\.|$)")
_DIGITS = re.compile(r"^\d+$")


def coarse_label_code(code: str) -> str:
    """Coarse tag for a raw concept code; raises InputError when unmappable.

    Skill/attitude/language codes keep their top-level letter-digit group
    (S1.2.1 -> S1); ISCED-F digit strings map to K plus their first two
    digits, zero-padded (0612 -> K06, 02 -> K02).
    """
    if _DIGITS.match(code):
        digits = code if len(code) >= 2 else code.zfill(2)
        tag = "K" + digits[:2]
    else:
        m = _LETTER_GROUP.match(code)
        if not m:
            raise InputError(f"concept code {code!r} has no mappable root")
        tag = m.group(1)
    if tag not in _TAG_ORDER or tag in ARTIFACT_TAGS:
        raise InputError(f"concept code {code!r} maps to unknown coarse tag {tag!r}")
    return tag


def coarse_label(concept: TaxonomyConcept) -> str:
    """Coarse tag of a concept (total over every loadable snapshot concept)."""
    return coarse_label_code(concept.code)


class TaxonomyIndex:
    """Immutable index of a snapshot for one language.

    Concepts are keyed by code and by URI; every label of the index language
    contributes its trigrams to the postings used for candidate retrieval.
    """

    def __init__(self, concepts: Iterable[TaxonomyConcept], language: str):
        self._concepts = tuple(concepts)
        self._language = language
        self._by_code: dict[str, TaxonomyConcept] = {}
        self._by_uri: dict[str, TaxonomyConcept] = {}
        self._labels: dict[str, tuple[str, ...]] = {}
        self._norm_labels: dict[str, tuple[str, ...]] = {}
        self._label_grams: dict[str, tuple[frozenset[str], ...]] = {}
        postings: dict[str, set[str]] = {}
        for c in self._concepts:
            self._by_code[c.code] = c
            if c.uri and c.uri not in self._by_uri:
                self._by_uri[c.uri] = c
            labels = labels_for(c, language)
            self._labels[c.code] = labels
            norm = tuple(normalize_text(lbl) for lbl in labels)
            self._norm_labels[c.code] = norm
            grams = tuple(trigrams(lbl) for lbl in norm)
            self._label_grams[c.code] = grams
            for gs in grams:
                for g in gs:
                    postings.setdefault(g, set()).add(c.code)
        self._trigram_index = {g: frozenset(codes) for g, codes in postings.items()}

    @property
    def language(self) -> str:
        return self._language

    @property
    def concepts(self) -> tuple[TaxonomyConcept, ...]:
        return self._concepts

    @property
    def trigram_index(self) -> dict[str, frozenset[str]]:
        return self._trigram_index

    def __len__(self) -> int:
        return len(self._concepts)

    def __iter__(self) -> Iterator[TaxonomyConcept]:
        return iter(self._concepts)

    def __contains__(self, code: str) -> bool:
        return code in self._by_code

    def get(self, code: str) -> TaxonomyConcept:
        try:
            return self._by_code[code]
        except KeyError:
            raise InputError(f"unknown concept code {code!r}") from None

    def by_uri(self, uri: str) -> TaxonomyConcept:
        try:
            return self._by_uri[uri]
        except KeyError:
            raise InputError(f"unknown concept uri {uri!r}") from None

    def labels(self, code: str) -> tuple[str, ...]:
        """Original labels of the index language, preferred first."""
        return self._labels.get(code, ())

    def norm_labels(self, code: str) -> tuple[str, ...]:
        return self._norm_labels.get(code, ())

    def label_grams(self, code: str) -> tuple[frozenset[str], ...]:
        return self._label_grams.get(code, ())

    def postings(self, gram: str) -> frozenset[str]:
        return self._trigram_index.get(gram, frozenset())


def _nfc(value):
    if isinstance(value, str):
        return unicodedata.normalize("NFC", value)
    return value


def _parse_concept_line(obj: dict, lineno: int) -> TaxonomyConcept:
    if not isinstance(obj, dict):
        raise InputError(f"line {lineno}: concept must be a JSON object")
    code = obj.get("code")
    if not isinstance(code, str) or not code:
        raise InputError(f"line {lineno}: missing or empty code")
    kind = obj.get("kind")
    if kind not in CONCEPT_KINDS:
        raise InputError(f"line {lineno}: unknown kind {kind!r}")
    pref = obj.get("preferred_label") or {}
    if not isinstance(pref, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in pref.items()
    ):
        raise InputError(f"line {lineno}: preferred_label must map language to string")
    alts = obj.get("alt_labels") or {}
    if not isinstance(alts, dict) or not all(
        isinstance(k, str) and isinstance(v, list) and all(isinstance(x, str) for x in v)
        for k, v in alts.items()
    ):
        raise InputError(f"line {lineno}: alt_labels must map language to list of strings")
    desc = obj.get("description")
    if desc is not None and not isinstance(desc, str):
        raise InputError(f"line {lineno}: description must be string or null")
    parent = obj.get("parent_code")
    if parent is not None and not isinstance(parent, str):
        raise InputError(f"line {lineno}: parent_code must be string or null")
    return TaxonomyConcept(
        code=_nfc(code),
        uri=_nfc(obj.get("uri") or ""),
        kind=kind,
        preferred_label={_nfc(k): _nfc(v) for k, v in pref.items()},
        alt_labels={_nfc(k): [_nfc(x) for x in v] for k, v in alts.items()},
        description=_nfc(desc),
        parent_code=_nfc(parent),
    )


def load_taxonomy(source: str | Path | IO[str], language: str) -> TaxonomyIndex:
    """Load and validate a snapshot, returning an index for `language`.

    Rejects malformed lines (with line number), duplicate codes, dangling
    parent codes, coarse-unmappable codes, and snapshots with no concept
    labeled in the requested language.
    """
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    concepts: list[TaxonomyConcept] = []
    seen: dict[str, int] = {}
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {lineno}: malformed JSON ({exc.msg})") from None
        concept = _parse_concept_line(obj, lineno)
        if concept.code in seen:
            raise InputError(
                f"line {lineno}: duplicate code {concept.code!r}"
                f" (first seen on line {seen[concept.code]})"
            )
        seen[concept.code] = lineno
        concepts.append(concept)
    for c in concepts:
        if c.parent_code is not None and c.parent_code not in seen:
            raise InputError(f"concept {c.code!r}: dangling parent {c.parent_code!r}")
        coarse_label(c)
    if not any(language in c.preferred_label for c in concepts):
        raise InputError(f"zero concepts carry a {language!r} preferred label")
    return TaxonomyIndex(concepts, language)


def write_taxonomy(concepts: Iterable[TaxonomyConcept], dest: str | Path | IO[str]) -> None:
    """Serialize concepts back to the snapshot JSON-lines format."""
    own = not hasattr(dest, "write")
    fh = open(dest, "w", encoding="utf-8") if own else dest
    try:
        for c in concepts:
            fh.write(
                json.dumps(
                    {
                        "code": c.code,
                        "uri": c.uri,
                        "kind": c.kind,
                        "preferred_label": c.preferred_label,
                        "alt_labels": c.alt_labels,
                        "description": c.description,
                        "parent_code": c.parent_code,
                    },
                    ensure_ascii=False,
                    sort_keys=True,
                )
                + "\n"
            )
    finally:
        if own:
            fh.close()


DEFAULT_BASE_URL = "https://ec.europa.eu/esco/api"
ESCO_BASE_URL_ENV = "KOMPET_ESCO_BASE_URL"

# Politeness cap on concurrent live-API requests.
_in_flight = threading.BoundedSemaphore(2)


def configure_politeness(max_in_flight: int) -> None:
    global _in_flight
    if max_in_flight < 1:
        raise InputError("politeness limit must be >= 1")
    _in_flight = threading.BoundedSemaphore(max_in_flight)


def _api_text(value, language: str) -> str | None:
    # The live API nests localized strings at varying depths; accept all of them.
    if isinstance(value, str):
        return value
    if isinstance(value, dict):
        inner = value.get(language) or value.get("en")
        if isinstance(inner, dict):
            inner = inner.get("literal")
        if isinstance(inner, str):
            return inner
    return None


def _concept_from_api(payload: dict, language: str, fallback_kind: str) -> TaxonomyConcept:
    uri = payload.get("uri") or ""
    code = payload.get("code") or (uri.rsplit("/", 1)[-1] if uri else "")
    pref = payload.get("preferredLabel")
    preferred = {}
    if isinstance(pref, dict):
        preferred = {k: v for k, v in pref.items() if isinstance(v, str)}
    elif isinstance(payload.get("title"), str):
        preferred = {language: payload["title"]}
    alts_raw = payload.get("alternativeLabel") or {}
    alts = {}
    if isinstance(alts_raw, dict):
        for k, v in alts_raw.items():
            if isinstance(v, list):
                alts[k] = [x for x in v if isinstance(x, str)]
            elif isinstance(v, str):
                alts[k] = [v]
    kind = payload.get("type")
    if kind not in CONCEPT_KINDS:
        kind = fallback_kind
    return TaxonomyConcept(
        code=_nfc(code),
        uri=_nfc(uri),
        kind=kind,
        preferred_label={_nfc(k): _nfc(v) for k, v in preferred.items()},
        alt_labels={_nfc(k): [_nfc(x) for x in v] for k, v in alts.items()},
        description=_nfc(_api_text(payload.get("description"), language)),
        parent_code=None,
    )


def fetch_online(
    query: str,
    kind: str,
    language: str,
    limit: int = 100,
    *,
    base_url: str | None = None,
    timeout: float = 10.0,
    session=None,
) -> list[TaxonomyConcept]:
    """Query the live ESCO search endpoint; results stay in API order.

    Raises ApiError on non-success status (retryable for 5xx/429), timeouts,
    and unparseable responses. An empty hit list is not an error.
    """
    if kind not in ("skill", "knowledge"):
        raise InputError(f"kind must be 'skill' or 'knowledge', got {kind!r}")
    if base_url is None:
        import os

        base_url = os.environ.get(ESCO_BASE_URL_ENV) or DEFAULT_BASE_URL
    params = {
        "text": query,
        "language": language,
        "type": kind,
        "limit": str(limit),
        "full": "true",
    }
    getter = session.get if session is not None else requests.get
    with _in_flight:
        try:
            resp = getter(
                base_url.rstrip("/") + "/search",
                params=params,
                headers={"Accept": "application/json"},
                timeout=timeout,
            )
        except requests.Timeout as exc:
            raise ApiError(f"ESCO request timed out after {timeout}s", retryable=True) from exc
        except requests.RequestException as exc:
            raise ApiError(f"ESCO request failed: {exc}", retryable=True) from exc
    if resp.status_code != 200:
        raise ApiError(
            f"ESCO search returned HTTP {resp.status_code}",
            status=resp.status_code,
            retryable=resp.status_code >= 500 or resp.status_code == 429,
        )
    try:
        data = resp.json()
    except ValueError as exc:
        raise ApiError("ESCO response not parseable as JSON") from exc
    results = (data.get("_embedded") or {}).get("results") or []
    return [_concept_from_api(r, language, kind) for r in results if isinstance(r, dict)]
