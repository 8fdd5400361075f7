import io

import numpy as np
import pytest

from conftest import concept, index_of
from kompet.corpus import SpanRecord
from kompet.errors import InputError
from kompet.evaluate import (
    baseline_predict,
    confusion_matrix,
    join_gold,
    read_predictions,
    weighted_macro_f1,
)
from kompet.supervise import LabeledRow
from oracles import f1_report_oracle

GOLD4 = ["S1", "S1", "K06", "A1"]
PRED4 = ["S1", "K06", "K06", "S1"]

TAGS = ["S1", "S2", "K06", "A1", "K99", "L1"]


def random_pair(rng, n):
    gold = [TAGS[i] for i in rng.integers(0, len(TAGS), n)]
    pred = [TAGS[i] for i in rng.integers(0, len(TAGS), n)]
    return gold, pred


class TestWeightedMacroF1:
    def test_hand_derived_four_items(self):
        report = weighted_macro_f1(GOLD4, PRED4)
        assert report.per_class["S1"].f1 == pytest.approx(0.5, abs=1e-12)
        assert report.per_class["S1"].support == 2
        assert report.per_class["K06"].f1 == pytest.approx(2 / 3, abs=1e-12)
        assert report.per_class["K06"].support == 1
        assert report.per_class["A1"].f1 == 0.0
        assert report.weighted_macro_f1 == pytest.approx(5 / 12, abs=1e-9)
        assert report.accuracy == pytest.approx(0.5)

    def test_perfect_prediction(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            gold, _ = random_pair(rng, int(rng.integers(1, 60)))
            report = weighted_macro_f1(gold, gold)
            assert report.weighted_macro_f1 == 1.0
            assert report.accuracy == 1.0

    def test_no_true_positives(self):
        report = weighted_macro_f1(["A1"], ["S1"])
        assert report.weighted_macro_f1 == 0.0

    def test_support_sums_to_n(self):
        report = weighted_macro_f1(GOLD4, PRED4)
        assert sum(m.support for m in report.per_class.values()) == report.n == 4

    def test_matches_bruteforce_oracle(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            gold, pred = random_pair(rng, int(rng.integers(1, 101)))
            report = weighted_macro_f1(gold, pred)
            per_class, weighted, accuracy = f1_report_oracle(gold, pred)
            assert report.weighted_macro_f1 == pytest.approx(float(weighted), abs=1e-12)
            assert report.accuracy == pytest.approx(float(accuracy), abs=1e-12)
            for tag, (precision, recall, f1, support) in per_class.items():
                m = report.per_class[tag]
                assert m.precision == pytest.approx(float(precision), abs=1e-12)
                assert m.recall == pytest.approx(float(recall), abs=1e-12)
                assert m.f1 == pytest.approx(float(f1), abs=1e-12)
                assert m.support == support

    def test_matches_sklearn_reference(self):
        from sklearn.metrics import f1_score

        rng = np.random.default_rng(13)
        for _ in range(20):
            gold, pred = random_pair(rng, int(rng.integers(2, 80)))
            labels = sorted(set(gold) | set(pred))
            ours = weighted_macro_f1(gold, pred).weighted_macro_f1
            ref = f1_score(gold, pred, labels=labels, average="weighted", zero_division=0)
            assert ours == pytest.approx(ref, abs=1e-12)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(3)
        gold, pred = random_pair(rng, 50)
        base = weighted_macro_f1(gold, pred)
        perm = rng.permutation(50)
        shuffled = weighted_macro_f1([gold[i] for i in perm], [pred[i] for i in perm])
        assert shuffled.weighted_macro_f1 == pytest.approx(base.weighted_macro_f1, abs=1e-15)
        assert shuffled.accuracy == pytest.approx(base.accuracy, abs=1e-15)

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(4)
        gold, pred = random_pair(rng, 50)
        mapping = dict(zip(TAGS, ["K00", "K01", "K02", "K03", "K04", "K05"]))
        base = weighted_macro_f1(gold, pred)
        mapped = weighted_macro_f1([mapping[g] for g in gold], [mapping[p] for p in pred])
        assert mapped.weighted_macro_f1 == pytest.approx(base.weighted_macro_f1, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            weighted_macro_f1(["S1"], ["S1", "S2"])

    def test_empty(self):
        with pytest.raises(InputError):
            weighted_macro_f1([], [])


class TestConfusionMatrix:
    def test_four_item_tally(self):
        cm = confusion_matrix(GOLD4, PRED4)
        pos = {tag: i for i, tag in enumerate(cm.labels)}
        assert cm.counts[pos["S1"], pos["S1"]] == 1
        assert cm.counts[pos["S1"], pos["K06"]] == 1
        assert cm.counts[pos["K06"], pos["K06"]] == 1
        assert cm.counts[pos["A1"], pos["S1"]] == 1
        assert cm.counts.sum() == 4

    def test_diagonal_for_perfect(self):
        cm = confusion_matrix(GOLD4, GOLD4)
        assert (cm.counts == np.diag(np.diag(cm.counts))).all()

    def test_row_normalized_rows_sum_to_one(self):
        rng = np.random.default_rng(8)
        gold, pred = random_pair(rng, 200)
        cm = confusion_matrix(gold, pred, normalization="row")
        sums = cm.counts.sum(axis=1)
        for i, tag in enumerate(cm.labels):
            if tag in gold:
                assert sums[i] == pytest.approx(1.0, abs=1e-9)
            else:
                assert sums[i] == 0.0

    def test_label_order_canonical(self):
        cm = confusion_matrix(["S1", "A1"], ["K06", "0000"])
        assert cm.labels == ("0000", "A1", "K06", "S1")

    def test_bad_normalization(self):
        with pytest.raises(InputError):
            confusion_matrix(GOLD4, PRED4, normalization="column")


def _spans(n):
    return [
        SpanRecord(f"p:{i}", "p", 0, 0, 1, "SKILL", f"word{i}") for i in range(n)
    ]


class TestBaselines:
    def test_majority_constant(self):
        preds = baseline_predict(_spans(4), "majority", histogram={"S1": 10, "A1": 3})
        assert preds == ["S1"] * 4

    def test_majority_tie_canonical_order(self):
        preds = baseline_predict(_spans(2), "majority", histogram={"S1": 5, "A1": 5})
        assert preds == ["A1", "A1"]

    def test_majority_empty_histogram(self):
        with pytest.raises(InputError):
            baseline_predict(_spans(1), "majority", histogram={})

    def test_matcher_delegates(self):
        index = index_of(concept("S1.1", label="kommunikere"))
        spans = [SpanRecord("p:0", "p", 0, 0, 1, "SKILL", "kommunikere")]
        assert baseline_predict(spans, "matcher", index=index) == ["S1"]

    def test_unknown_mode(self):
        with pytest.raises(InputError):
            baseline_predict(_spans(1), "nearest")


class TestPredictionIO:
    def test_tsv(self):
        text = "span_id\tgold\tpred\np:0\tS1\tA1\np:1\tK06\tK06\n"
        rows = read_predictions(io.StringIO(text))
        assert rows == [
            {"span_id": "p:0", "gold": "S1", "pred": "A1"},
            {"span_id": "p:1", "gold": "K06", "pred": "K06"},
        ]

    def test_jsonl(self):
        text = '{"span_id": "p:0", "gold": "S1", "pred": "A1"}\n'
        rows = read_predictions(io.StringIO(text))
        assert rows == [{"span_id": "p:0", "gold": "S1", "pred": "A1"}]

    def test_tsv_without_gold_column(self):
        rows = read_predictions(io.StringIO("span_id\tpred\np:0\tS1\n"))
        assert rows == [{"span_id": "p:0", "gold": None, "pred": "S1"}]

    def test_missing_header(self):
        with pytest.raises(InputError):
            read_predictions(io.StringIO("p:0\tS1\n"))

    def test_join_gold(self):
        rows = [{"span_id": "p:0", "gold": None, "pred": "A1"}]
        gold_rows = [LabeledRow("p:0", "x", "SKILL", "S1", "gold", False)]
        gold, pred = join_gold(rows, gold_rows)
        assert gold == ["S1"] and pred == ["A1"]

    def test_join_gold_unknown_id(self):
        rows = [{"span_id": "p:9", "gold": None, "pred": "A1"}]
        with pytest.raises(InputError, match="unknown span_id"):
            join_gold(rows, [LabeledRow("p:0", "x", "SKILL", "S1", "gold", False)])
