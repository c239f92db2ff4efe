import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from btvalid.corpus import Corpus, TextRecord
from btvalid.sentiment import (SentimentResult, UndefinedMetric, ValenceLexicon, accuracy, bootstrap_accuracy,
                               correctness, load_lexicon, load_lexicons, score_text, sentiment_report)
from btvalid.tokens import tokenize

LEX = ValenceLexicon("xx", {"good": 1, "happy": 1, "bad": -1})


@pytest.mark.parametrize("text, polarity, label, scored", [
    ("good happy day", 1.0, 1, 2),
    ("good bad", 0.0, 0, 2),
    ("quantum flux", 0.0, 0, 0),
    ("bad bad good day", -1 / 3, -1, 3),
    ("(good!) «happy»", 1.0, 1, 2),
])
def test_score_text_examples(text, polarity, label, scored):
    r = score_text(text, LEX, "r1")
    assert r == SentimentResult("r1", pytest.approx(polarity), label, scored)


def test_tokenizer_splits_han_characters():
    assert tokenize("我很好 ok.") == ["我", "很", "好", "ok"]
    zh = ValenceLexicon("zh", {"好": 1})
    assert score_text("我很好", zh).label == 1


words = st.lists(st.sampled_from(["good", "happy", "bad", "meh", "day", "sad"]), max_size=12).map(" ".join)
lexicons = st.dictionaries(st.sampled_from(["good", "happy", "bad", "sad", "day"]), st.sampled_from([-1, 0, 1]))


@given(words, lexicons)
def test_polarity_bounds_and_antisymmetry(text, entries):
    lex = ValenceLexicon("xx", entries)
    r = score_text(text, lex)
    flipped = score_text(text, lex.negated())
    assert -1 <= r.polarity <= 1
    assert r.label == (r.polarity > 0) - (r.polarity < 0)
    assert r.scored_word_count > 0 or r.polarity == 0
    assert flipped.polarity == -r.polarity and flipped.label == -r.label


def test_accuracy_examples():
    assert accuracy([1, -1, -1], [1, -1, 1], exclude_neutral=False) == pytest.approx(2 / 3)
    assert accuracy([1, 1, 0], [1, 0, -1], exclude_neutral=True) == 1.0
    assert accuracy([1, 1, 0], [1, 0, -1], exclude_neutral="gold") == 0.5
    assert accuracy([1, 1, 0], [1, 0, -1], exclude_neutral="predicted") == 0.5
    with pytest.raises(UndefinedMetric):
        accuracy([0, 1], [1, 0])
    with pytest.raises(ValueError):
        accuracy([1], [1, 1])


labels = st.lists(st.tuples(st.sampled_from([-1, 0, 1]), st.sampled_from([-1, 0, 1])), min_size=1, max_size=40)


@given(labels, st.randoms())
def test_accuracy_properties(pairs, rnd):
    preds, gold = zip(*pairs)
    assert accuracy(list(gold), list(gold), False) == 1.0
    acc = accuracy(preds, gold, False)
    assert 0 <= acc <= 1
    shuffled = list(pairs)
    rnd.shuffle(shuffled)
    p2, g2 = zip(*shuffled)
    assert accuracy(p2, g2, False) == pytest.approx(acc)


def test_bootstrap_accuracy_constant_and_deterministic():
    s = bootstrap_accuracy([1, -1] * 10, [1, -1] * 10, replicates=1000, seed=3)
    assert (s.median, s.low, s.high) == (1.0, 1.0, 1.0)
    gold = [1, -1, 1, 1, -1] * 40
    preds = [1, -1, -1, 1, 1] * 40
    assert bootstrap_accuracy(preds, gold, seed=5) == bootstrap_accuracy(preds, gold, seed=5)
    assert bootstrap_accuracy(preds, gold, seed=5) != bootstrap_accuracy(preds, gold, seed=6)


def _corpus(lang, rows):
    return Corpus(lang, tuple(TextRecord(str(i), lang, o, p, b, label=g) for i, (o, p, b, g) in enumerate(rows)), {})


def test_sentiment_report_identity_and_structure():
    rows = [("good day", "good day", "good day", 1), ("bad day", "bad day", "bad day", -1),
            ("good", "good", "good", -1), ("meh", "meh", "meh", 1), ("happy", "happy", "happy", 0)] * 20
    lexicons = {"xx": LEX, "en": LEX}
    report = sentiment_report([_corpus("xx", rows)], lexicons, replicates=300, seed=1)
    xx = report["languages"]["xx"]
    assert xx["original"] == xx["back"] == xx["pivot"]
    assert xx["original"].n_evaluable == 60
    assert report["pooled"]["original"].to_dict().keys() == {"n_evaluable", "median", "hci99_low", "hci99_high"}


def test_sentiment_report_skips_missing_lexicon_and_pools():
    a = _corpus("aa", [("good", "good", "good", 1)] * 10)
    b = _corpus("bb", [("bad", "bad", "bad", 1)] * 10)
    c = _corpus("cc", [("good", "good", "good", 1)] * 10)
    lexicons = {"aa": LEX, "bb": LEX, "en": LEX}
    report = sentiment_report([a, b, c], lexicons, replicates=200)
    assert sorted(report["languages"]) == ["aa", "bb"]
    assert "cc" in report["skipped"]
    pooled = report["pooled"]["back"]
    assert pooled.n_evaluable == 20
    assert pooled.summary.low < 0.5 < pooled.summary.high


def test_sentiment_report_variant_without_evaluable_items_is_null():
    rows = [("good", "meh", "good", 1)] * 5
    report = sentiment_report(_corpus("xx", rows), {"xx": LEX, "en": LEX}, replicates=50)
    assert report["languages"]["xx"]["pivot"] is None
    assert report["languages"]["xx"]["back"].summary.median == 1.0


def test_lexicon_files(tmp_path):
    (tmp_path / "de.tsv").write_text("# comment\nGut\t1\nschlecht\t-1\n\negal\t0\n", encoding="utf-8")
    lex = load_lexicon(tmp_path / "de.tsv")
    assert lex.lang == "de" and lex.entries == {"gut": 1, "schlecht": -1, "egal": 0}
    assert set(load_lexicons(tmp_path)) == {"de"}
    (tmp_path / "bad.tsv").write_text("x\t2\n", encoding="utf-8")
    with pytest.raises(ValueError, match="bad.tsv:1"):
        load_lexicon(tmp_path / "bad.tsv")
    with pytest.raises(ValueError):
        ValenceLexicon("xx", {"Upper": 1})


def test_correctness_vector_matches_accuracy():
    hits = correctness([1, -1, 1, 0], [1, 1, 1, 1])
    assert hits.tolist() == [1.0, 0.0, 1.0]
    assert np.mean(hits) == accuracy([1, -1, 1, 0], [1, 1, 1, 1])
