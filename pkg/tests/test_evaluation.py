import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from spanmine import (
    AlignmentError,
    DataError,
    Document,
    evaluate,
    evaluate_file,
    f1_at_k,
    f1_at_m,
    keyphrase_set,
    parse_predictions,
    split_present_absent,
)


class TestParsePredictions:
    def test_splits_on_separator(self):
        out = parse_predictions("short signatures ; pairing ;")
        assert out.phrases == (("short", "signatures"), ("pairing",))

    def test_only_separators_empty(self):
        assert len(parse_predictions(";;;")) == 0

    def test_raw_duplicates_survive_until_dedup(self):
        out = parse_predictions("a b;a b")
        assert len(out.phrases) == 2
        assert len(out.deduped()) == 1

    def test_normalizes_digits_and_case(self):
        out = parse_predictions("Top 100 Models")
        assert out.phrases == (("top", "<digit>", "models"),)

    def test_custom_separator(self):
        out = parse_predictions("one | two", sep="|")
        assert out.phrases == (("one",), ("two",))


class TestPresentAbsentSplit:
    def test_structural_mechanics_document(self, labeled_doc, labeled_tokenized):
        gold = keyphrase_set(labeled_doc.keyphrases)
        present, absent = split_present_absent(gold, labeled_tokenized)
        present_texts = {" ".join(p) for p in present.phrases}
        absent_texts = {" ".join(p) for p in absent.phrases}
        assert "mixed finite elements" in present_texts
        assert "hybrid formulations" in absent_texts
        assert "plasticity" in absent_texts
        assert present_texts | absent_texts == {" ".join(p) for p in gold.phrases}
        assert present_texts.isdisjoint(absent_texts)

    def test_stem_match_counts_as_present(self):
        from spanmine import model_input

        doc = model_input(Document("d", "", "graph networks at scale"), max_tokens=None)
        present, absent = split_present_absent(keyphrase_set(["network"]), doc)
        assert len(present) == 1
        assert len(absent) == 0

    def test_contiguity_required(self):
        from spanmine import model_input

        doc = model_input(Document("d", "", "alpha beta gamma"), max_tokens=None)
        present, absent = split_present_absent(keyphrase_set(["alpha gamma"]), doc)
        assert len(present) == 0
        assert len(absent) == 1


class TestF1AtM:
    def test_arithmetic(self):
        preds = keyphrase_set(["a", "c", "d"])
        gold = keyphrase_set(["a", "b"])
        scores = f1_at_m(preds, gold)
        assert scores.precision == pytest.approx(1 / 3)
        assert scores.recall == pytest.approx(1 / 2)
        assert scores.f1 == pytest.approx(0.4)

    def test_exact_match_is_one(self):
        preds = keyphrase_set(["x y", "z"])
        scores = f1_at_m(preds, keyphrase_set(["z", "x y"]))
        assert scores.f1 == 1.0

    def test_no_predictions(self):
        scores = f1_at_m(keyphrase_set([]), keyphrase_set(["a"]))
        assert (scores.precision, scores.recall, scores.f1) == (0.0, 0.0, 0.0)

    def test_empty_gold_rejected(self):
        with pytest.raises(DataError):
            f1_at_m(keyphrase_set(["a"]), keyphrase_set([]))

    def test_duplicates_never_change_scores(self):
        preds_dup = keyphrase_set(["a", "a", "b"])
        preds = keyphrase_set(["a", "b"])
        gold = keyphrase_set(["a", "c"])
        assert f1_at_m(preds_dup, gold) == f1_at_m(preds, gold)

    def test_stemmed_matching(self):
        scores = f1_at_m(keyphrase_set(["neural networks"]), keyphrase_set(["neural network"]))
        assert scores.f1 == 1.0

    @given(
        st.lists(st.sampled_from(["pa", "pb", "pc", "pd qe", "rf"]), max_size=6),
        st.lists(st.sampled_from(["pa", "pb", "pc", "pd qe", "rf"]), min_size=1, max_size=6),
    )
    @settings(max_examples=150)
    def test_perfect_score_iff_sets_equal(self, preds, gold):
        scores = f1_at_m(keyphrase_set(preds), keyphrase_set(gold))
        sets_equal = set(keyphrase_set(preds).deduped()) == set(keyphrase_set(gold).deduped())
        assert (scores.f1 == 1.0) == sets_equal


class TestF1AtK:
    def test_padded_denominator(self):
        preds = keyphrase_set(["hit", "miss1", "miss2"])
        gold = keyphrase_set(["hit", "other"])
        scores = f1_at_k(preds, gold, k=5)
        assert scores.precision == pytest.approx(1 / 5)
        assert scores.recall == pytest.approx(1 / 2)
        assert scores.f1 == pytest.approx(2 / 7)

    def test_exactly_five_used(self):
        preds = keyphrase_set(["ga", "gb", "gc", "gd", "ge", "gf", "gg"])
        gold = keyphrase_set(["gf", "gg"])
        scores = f1_at_k(preds, gold, k=5)
        assert scores.precision == 0.0  # hits sit beyond position 5

    def test_perfect_short_output(self):
        preds = keyphrase_set(["a", "b"])
        gold = keyphrase_set(["a", "b"])
        scores = f1_at_k(preds, gold, k=2)
        assert scores.f1 == 1.0

    @given(st.integers(min_value=1, max_value=6), st.integers(min_value=0, max_value=12))
    @settings(max_examples=80)
    def test_invariant_to_tail_beyond_k(self, k, extra):
        base = [f"p{chr(97 + i)}" for i in range(k)]
        tail = [f"tail{chr(97 + i)}" for i in range(extra)]
        gold = keyphrase_set(["pa", "pb"])
        assert f1_at_k(keyphrase_set(base), gold, k) == f1_at_k(keyphrase_set(base + tail), gold, k)


class TestEvaluate:
    def _gold_doc(self):
        return Document(
            id="g0",
            title="graph pruning",
            body="we prune graphs with spectral tools",
            keyphrases=("graph pruning", "spectral tools", "sparse solvers"),
        )

    def test_single_doc_hand_computed(self):
        # Present gold: {graph pruning, spectral tools}; absent: {sparse solvers}.
        # Present preds: {graph pruning}; absent preds: {dense solvers}.
        report = evaluate(["graph pruning ; dense solvers"], [self._gold_doc()])
        present = report.present.per_doc[0]
        assert present.at_m.precision == 1.0
        assert present.at_m.recall == 0.5
        assert present.at_m.f1 == pytest.approx(2 / 3)
        assert present.at_k.precision == pytest.approx(1 / 5)
        absent = report.absent.per_doc[0]
        assert absent.at_m.f1 == 0.0

    def test_empty_category_skipped_not_zeroed(self):
        doc = Document("d", "t", "alpha beta", keyphrases=("alpha beta",))  # no absent gold
        report = evaluate(["alpha beta"], [doc])
        assert report.absent.docs_skipped == 1
        assert report.absent.docs_scored == 0
        assert report.present.f1_at_m == 1.0

    def test_misalignment_rejected(self):
        docs = [self._gold_doc()]
        with pytest.raises(AlignmentError, match="2 .*1"):
            evaluate(["a", "b"], docs)

    def test_macro_average_is_mean_over_scored_docs(self):
        docs = [
            Document("d1", "", "alpha beta", ("alpha", "zz")),
            Document("d2", "", "gamma delta", ("gamma", "qq")),
        ]
        report = evaluate(["alpha", "nothing"], docs)
        f1s = [d.at_m.f1 for d in report.present.per_doc]
        assert report.present.f1_at_m == pytest.approx(sum(f1s) / 2)
        assert report.present.f1_at_m == pytest.approx(0.5)

    def test_document_order_invariance_of_macro(self):
        docs = [
            Document("d1", "", "alpha beta", ("alpha", "zz")),
            Document("d2", "", "gamma delta", ("gamma", "delta")),
        ]
        preds = ["alpha", "gamma ; delta"]
        forward = evaluate(preds, docs)
        backward = evaluate(list(reversed(preds)), list(reversed(docs)))
        assert forward.present.f1_at_m == pytest.approx(backward.present.f1_at_m)
        assert forward.absent.docs_skipped == backward.absent.docs_skipped

    def test_evaluate_file_and_report(self, tmp_path):
        preds = tmp_path / "preds.txt"
        preds.write_text("graph pruning ; dense solvers\n", encoding="utf-8")
        report_path = tmp_path / "report.json"
        report = evaluate_file(preds, [self._gold_doc()], report_path=report_path)
        assert report.num_docs == 1
        written = json.loads(report_path.read_text())
        assert written["schema_version"] == 1
        assert written["present"]["f1_at_m"] == pytest.approx(2 / 3)
        assert written["present"]["per_doc"][0]["id"] == "g0"

    def test_gold_without_keyphrases_rejected(self):
        with pytest.raises(DataError):
            evaluate(["x"], [Document("d", "t", "b", None)])
