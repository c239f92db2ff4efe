import itertools
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from btvalid.corpus import Corpus, TextRecord
from btvalid.embed import (Baselines, EmbeddingFormatError, EmbeddingTable, SentenceVector,
                           backtranslation_distances, cosine_distance, embed_sentence, embedding_report,
                           embedding_verdict, load_embedding_dir, load_embeddings, peer_baselines)

TABLE = EmbeddingTable.from_mapping("xx", {"cat": [1.0, 0.0], "dog": [0.0, 1.0], "cow": [0.6, 0.8]})


def test_load_examples(tmp_path):
    p = tmp_path / "de.txt"
    p.write_text("cat 1 0\ndog 0 1\n", encoding="utf-8")
    table = load_embeddings(p)
    assert (table.lang, table.dim, len(table)) == ("de", 2, 2)
    bad = tmp_path / "bad.txt"
    bad.write_text("a 1 2 3\nb 1 2\n", encoding="utf-8")
    with pytest.raises(EmbeddingFormatError, match="bad.txt:2"):
        load_embeddings(bad)
    empty = tmp_path / "empty.txt"
    empty.write_text("", encoding="utf-8")
    table = load_embeddings(empty)
    assert table.dim is None and len(table) == 0
    with pytest.raises(ValueError):
        embed_sentence(["cat"], table)


def test_load_header_duplicates_and_junk(tmp_path, caplog):
    p = tmp_path / "fr.vec"
    p.write_text("3 2\nchat 1 0\nchat 9 9\nchien x y\nseul\nvache 0 1\n", encoding="utf-8")
    table = load_embeddings(p)
    assert sorted(table.index) == ["chat", "vache"]
    assert table.vector("chat").tolist() == [1.0, 0.0]
    assert "duplicate" in caplog.text and "unparseable" in caplog.text
    assert set(load_embedding_dir(tmp_path)) == {"fr"}


def test_embed_examples():
    v = embed_sentence(["cat", "dog"], TABLE, "r")
    np.testing.assert_allclose(v.vector, [0.70710678, 0.70710678], atol=1e-8)
    assert v.in_vocab_count == 2
    assert embed_sentence(["cat"], TABLE).vector.tolist() == [1.0, 0.0]
    unknown = embed_sentence(["unknown"], TABLE)
    assert not unknown.defined and unknown.in_vocab_count == 0
    with pytest.raises(ValueError):
        cosine_distance(unknown, v)


def test_cosine_distance_hand_values():
    assert cosine_distance([0.3, 0.4], [0.3, 0.4]) == 0.0
    assert abs(cosine_distance([1, 0], [0, 1]) - 1.0) <= 1e-12
    assert abs(cosine_distance([1, 0], [0.6, 0.8]) - 0.4) <= 1e-12
    assert cosine_distance([1, 0], [-1, 0]) == 2.0
    with pytest.raises(ValueError):
        cosine_distance([1, 0], [1, 0, 0])


vec3 = arrays(np.float64, 3, elements=st.floats(-10, 10)).filter(lambda a: np.linalg.norm(a) > 1e-3)


@given(vec3, vec3, st.floats(0.01, 100))
def test_cosine_properties(u, v, c):
    d = cosine_distance(u, v)
    assert 0 <= d <= 2
    assert d == pytest.approx(cosine_distance(v, u), abs=1e-12)
    assert d == pytest.approx(cosine_distance(c * u, v), abs=1e-9)
    assert cosine_distance(u, u) == 0


words = st.lists(st.sampled_from(["cat", "dog", "cow", "owl"]), min_size=1, max_size=8)


@given(words, st.randoms())
def test_embed_order_invariance_and_unit_norm(tokens, rnd):
    a = embed_sentence(tokens, TABLE)
    shuffled = list(tokens)
    rnd.shuffle(shuffled)
    b = embed_sentence(shuffled, TABLE)
    assert a.defined == b.defined
    if a.defined:
        assert np.array_equal(a.vector, b.vector)
        assert abs(np.linalg.norm(a.vector) - 1) < 1e-9


def gram_vectors(cos):
    """Unit vectors with a prescribed cosine matrix (Cholesky factor rows)."""
    return np.linalg.cholesky(np.asarray(cos, dtype=float))


def exhaustive_baselines(mat):
    """Every record against every other record, distances via cosine_distance."""
    n = len(mat)
    d = {(i, j): cosine_distance(mat[i], mat[j]) for i, j in itertools.permutations(range(n), 2)}
    minima = [min(d[i, j] for j in range(n) if j != i) for i in range(n)]
    means = [sum(d[i, j] for j in range(n) if j != i) / (n - 1) for i in range(n)]
    return sum(minima) / n, sum(means) / n


def test_three_record_hand_example():
    # pairwise distances 0.2 (0,1), 0.4 (0,2), 0.6 (1,2)
    mat = gram_vectors([[1, 0.8, 0.6], [0.8, 1, 0.4], [0.6, 0.4, 1]])
    b = peer_baselines(mat, peers=2)
    assert b.min_baseline == pytest.approx((0.2 + 0.2 + 0.4) / 3, abs=1e-12)
    assert b.mean_baseline == pytest.approx(0.4, abs=1e-12)


def test_identical_sentences_give_zero_baselines():
    b = peer_baselines(np.tile([0.6, 0.8], (6, 1)), peers=3, seed=1)
    assert (b.min_baseline, b.mean_baseline) == (0.0, 0.0)


def test_peer_clamp_warns_and_matches_exhaustive():
    mat = np.random.default_rng(3).normal(size=(6, 4))
    with pytest.warns(UserWarning, match="clamped"):
        b = peer_baselines(mat, peers=5000)
    assert b.peers == 5
    lo, hi = exhaustive_baselines(mat)
    assert abs(b.min_baseline - lo) <= 1e-12 and abs(b.mean_baseline - hi) <= 1e-12


def test_peer_sampling_is_deterministic_and_excludes_self():
    mat = np.random.default_rng(5).normal(size=(40, 3))
    a = peer_baselines(mat, peers=5, seed=2)
    assert a == peer_baselines(mat, peers=5, seed=2)
    assert a != peer_baselines(mat, peers=5, seed=3)
    # an anchor among its own peers would force every minimum to 0
    assert a.min_baseline > 0
    with pytest.raises(ValueError):
        peer_baselines(mat[:1], peers=1)


@settings(max_examples=60)
@given(st.integers(2, 25), st.integers(1, 30), st.integers(0, 2**32))
def test_min_baseline_never_exceeds_mean(n, peers, seed):
    mat = np.random.default_rng(seed).normal(size=(n, 5))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        b = peer_baselines(mat, peers=peers, seed=seed)
    assert b.min_baseline <= b.mean_baseline + 1e-15


def test_verdict_examples():
    base = Baselines(0.101, 0.416, 5000, 100)
    assert embedding_verdict(0.146, base) == embedding_verdict(0.146, {"min_baseline": 0.101, "mean_baseline": 0.416})
    v = embedding_verdict(0.146, base)
    assert (v.passes_min, v.passes_mean) == (False, True)
    v = embedding_verdict(0.184, {"min_baseline": 0.053, "mean_baseline": 0.352})
    assert (v.passes_min, v.passes_mean) == (False, True)
    v = embedding_verdict(0.0, {"min_baseline": 0.01, "mean_baseline": 0.2})
    assert (v.passes_min, v.passes_mean) == (True, True)


def test_backtranslation_distances_and_report():
    records = (TextRecord("a", "xx", "cat dog", text_back="cat dog"),
               TextRecord("b", "xx", "cat", text_back="cow"),
               TextRecord("c", "xx", "owl", text_back="cat"),
               TextRecord("d", "xx", "dog", text_back=None),
               TextRecord("e", "xx", "dog cow"))
    corpus = Corpus("xx", records, {})
    d = backtranslation_distances(corpus, TABLE)
    assert d.per_id == {"a": 0.0, "b": pytest.approx(0.4)}
    assert d.excluded == 3 and d.mean == pytest.approx(0.2)
    report = embedding_report(corpus, TABLE, peers=10, seed=0)
    assert report["peers"] == 3
    assert report["excluded_counts"] == {"back_distance": 3, "baseline": 1}
    assert report["min_baseline"] <= report["mean_baseline"]


def test_sentence_vector_marker():
    assert not SentenceVector("x", None, 0).defined
