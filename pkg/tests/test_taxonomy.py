import io
import json

import pytest

from conftest import concept
from kompet.errors import ApiError, InputError
from kompet.taxonomy import (
    COARSE_TAGS,
    TaxonomyConcept,
    coarse_label,
    coarse_label_code,
    fetch_online,
    is_coarse_tag,
    labels_for,
    load_taxonomy,
    normalize_text,
    tag_sort_key,
    write_taxonomy,
)

SNAPSHOT = """\
{"code": "S1", "uri": "u:S1", "kind": "skill", "preferred_label": {"da": "kommunikation"}, "alt_labels": {}, "description": null, "parent_code": null}
{"code": "S1.2.1", "uri": "u:S121", "kind": "skill", "preferred_label": {"da": "arbejde i team"}, "alt_labels": {"da": ["teamwork"]}, "description": null, "parent_code": "S1"}
{"code": "02", "uri": "u:02", "kind": "knowledge", "preferred_label": {"da": "kunst og humaniora"}, "alt_labels": {}, "description": "ISCED felt", "parent_code": null}
"""


class TestCoarseLabel:
    def test_prefix_truncation(self):
        assert coarse_label_code("S1.2.1") == "S1"
        assert coarse_label_code("A1.3") == "A1"
        assert coarse_label_code("L1.da") == "L1"
        assert coarse_label_code("S4") == "S4"

    def test_isced_zero_padding(self):
        assert coarse_label_code("02") == "K02"
        assert coarse_label_code("0612") == "K06"
        assert coarse_label_code("99") == "K99"
        assert coarse_label_code("6") == "K06"

    def test_unmappable(self):
        # "12" is digit-shaped but outside the K00-K10/K99 field set;
        # "S9.1" and "L2.1" have letter groups outside the closed tag set.
        for bad in ("X1", "", "S", "S9.1", "12", "L2.1", "2345x"):
            with pytest.raises(InputError):
                coarse_label_code(bad)

    def test_total_over_snapshot(self, golden_index):
        for c in golden_index:
            assert is_coarse_tag(coarse_label(c))

    def test_same_group_same_tag(self, golden_index):
        by_group = {}
        for c in golden_index:
            key = c.code.split(".")[0][:2] if c.code[0].isdigit() else c.code.split(".")[0]
            by_group.setdefault(key, set()).add(coarse_label(c))
        for group, tags in by_group.items():
            assert len(tags) == 1, (group, tags)

    def test_artifact_tags_never_generated(self):
        assert is_coarse_tag("0000") and is_coarse_tag("K?") and is_coarse_tag("S?")
        for code in ("S1", "02", "A1.1"):
            assert coarse_label_code(code) not in ("0000", "K?", "S?")


class TestTagOrder:
    def test_canonical_order(self):
        assert COARSE_TAGS[0] == "0000"
        assert COARSE_TAGS[-2:] == ("K?", "S?")
        tags = ["S1", "K06", "A1", "K?", "0000"]
        assert sorted(tags, key=tag_sort_key) == ["0000", "A1", "K06", "S1", "K?"]

    def test_unknown_tags_sort_last(self):
        assert sorted(["zz", "S1"], key=tag_sort_key) == ["S1", "zz"]


class TestLoadTaxonomy:
    def test_loads_snapshot(self):
        index = load_taxonomy(io.StringIO(SNAPSHOT), "da")
        assert len(index) == 3
        assert index.get("S1.2.1").parent_code == "S1"
        # Every Danish label contributes trigrams.
        assert "tea" in index.trigram_index
        assert index.postings("tea") == {"S1.2.1"}

    def test_duplicate_code(self):
        doubled = SNAPSHOT + SNAPSHOT.splitlines()[0] + "\n"
        with pytest.raises(InputError, match="duplicate code"):
            load_taxonomy(io.StringIO(doubled), "da")

    def test_dangling_parent(self):
        line = json.dumps(
            {
                "code": "S2.1",
                "uri": "u:S21",
                "kind": "skill",
                "preferred_label": {"da": "x"},
                "alt_labels": {},
                "description": None,
                "parent_code": "S2",
            }
        )
        with pytest.raises(InputError, match="dangling parent"):
            load_taxonomy(io.StringIO(line + "\n"), "da")

    def test_malformed_line_reports_number(self):
        with pytest.raises(InputError, match="line 2"):
            load_taxonomy(io.StringIO(SNAPSHOT.splitlines()[0] + "\n{oops\n"), "da")

    def test_zero_concepts_for_language(self):
        with pytest.raises(InputError, match="zero concepts"):
            load_taxonomy(io.StringIO(SNAPSHOT), "fi")

    def test_unknown_kind(self):
        line = SNAPSHOT.splitlines()[0].replace('"skill"', '"verb"')
        with pytest.raises(InputError, match="unknown kind"):
            load_taxonomy(io.StringIO(line + "\n"), "da")

    def test_unmappable_code_rejected_at_load(self):
        line = json.dumps(
            {
                "code": "X9",
                "uri": "u:X9",
                "kind": "skill",
                "preferred_label": {"da": "x"},
                "alt_labels": {},
                "description": None,
                "parent_code": None,
            }
        )
        with pytest.raises(InputError, match="no mappable root"):
            load_taxonomy(io.StringIO(line + "\n"), "da")

    def test_round_trip(self, golden_index):
        buf = io.StringIO()
        write_taxonomy(golden_index.concepts, buf)
        again = load_taxonomy(io.StringIO(buf.getvalue()), "da")
        assert again.concepts == golden_index.concepts


class TestLabelsFor:
    def test_preferred_first_then_alts(self):
        c = concept("S1", label="samarbejde", alts=("teamwork", "arbejde i team"))
        assert labels_for(c, "da") == ("samarbejde", "teamwork", "arbejde i team")

    def test_missing_language_empty(self):
        c = concept("S1", label="samarbejde")
        assert labels_for(c, "en") == ()

    def test_all_languages_deterministic(self):
        c = TaxonomyConcept(
            code="S1",
            uri="u:S1",
            kind="skill",
            preferred_label={"en": "collaboration", "da": "samarbejde"},
            alt_labels={"en": ["teamwork"]},
        )
        assert labels_for(c) == ("samarbejde", "collaboration", "teamwork")


class TestNormalize:
    def test_lowercase_nfc(self):
        assert normalize_text("Dansk") == "dansk"
        # NFD "å" composes to NFC.
        assert normalize_text("å") == "å"

    def test_diacritics_preserved(self):
        assert normalize_text("Færdigheder") == "færdigheder"


class _FakeResponse:
    def __init__(self, status_code=200, payload=None, text="{"):
        self.status_code = status_code
        self._payload = payload
        self._text = text

    def json(self):
        if self._payload is None:
            raise ValueError("not json")
        return self._payload


class TestFetchOnline:
    def _payload(self, *results):
        return {"_embedded": {"results": list(results)}}

    def test_request_construction(self, monkeypatch):
        seen = {}

        def fake_get(url, params=None, headers=None, timeout=None):
            seen.update(url=url, params=params, headers=headers, timeout=timeout)
            return _FakeResponse(payload=self._payload())

        monkeypatch.setattr("kompet.taxonomy.requests.get", fake_get)
        got = fetch_online("datamodellering", "skill", "da", limit=100)
        assert got == []
        assert seen["url"].endswith("/search")
        assert seen["params"] == {
            "text": "datamodellering",
            "language": "da",
            "type": "skill",
            "limit": "100",
            "full": "true",
        }
        assert seen["headers"]["Accept"] == "application/json"
        assert seen["timeout"] == 10.0

    def test_results_in_api_order(self, monkeypatch):
        payload = self._payload(
            {"uri": "http://x/skill/S2.b", "preferredLabel": {"da": "beta"}, "type": "skill"},
            {"uri": "http://x/skill/S1.a", "preferredLabel": {"da": "alfa"}, "type": "skill"},
        )
        monkeypatch.setattr(
            "kompet.taxonomy.requests.get", lambda *a, **k: _FakeResponse(payload=payload)
        )
        got = fetch_online("x", "skill", "da")
        assert [c.code for c in got] == ["S2.b", "S1.a"]
        assert got[0].preferred_label == {"da": "beta"}

    def test_http_503_retryable(self, monkeypatch):
        monkeypatch.setattr(
            "kompet.taxonomy.requests.get", lambda *a, **k: _FakeResponse(status_code=503)
        )
        with pytest.raises(ApiError) as exc:
            fetch_online("x", "skill", "da")
        assert exc.value.status == 503
        assert exc.value.retryable

    def test_http_404_not_retryable(self, monkeypatch):
        monkeypatch.setattr(
            "kompet.taxonomy.requests.get", lambda *a, **k: _FakeResponse(status_code=404)
        )
        with pytest.raises(ApiError) as exc:
            fetch_online("x", "skill", "da")
        assert exc.value.status == 404
        assert not exc.value.retryable

    def test_unparseable_response(self, monkeypatch):
        monkeypatch.setattr(
            "kompet.taxonomy.requests.get", lambda *a, **k: _FakeResponse(payload=None)
        )
        with pytest.raises(ApiError, match="not parseable"):
            fetch_online("x", "skill", "da")

    def test_env_base_url(self, monkeypatch):
        seen = {}

        def fake_get(url, **kwargs):
            seen["url"] = url
            return _FakeResponse(payload=self._payload())

        monkeypatch.setattr("kompet.taxonomy.requests.get", fake_get)
        monkeypatch.setenv("KOMPET_ESCO_BASE_URL", "http://localhost:9999/api")
        fetch_online("x", "knowledge", "da")
        assert seen["url"] == "http://localhost:9999/api/search"

    def test_bad_kind(self):
        with pytest.raises(InputError):
            fetch_online("x", "occupation", "da")

    def test_never_mutates_index(self, monkeypatch, golden_index):
        before = golden_index.concepts
        monkeypatch.setattr(
            "kompet.taxonomy.requests.get", lambda *a, **k: _FakeResponse(payload=self._payload())
        )
        fetch_online("x", "skill", "da")
        assert golden_index.concepts == before

    def test_politeness_limit_validated(self):
        from kompet.taxonomy import configure_politeness

        with pytest.raises(InputError):
            configure_politeness(0)
        configure_politeness(2)  # restore default
