"""Synthetic corpora with known structure, for tests, demos and desk-scale validation.

Every document is drawn from one topic with its own 50-word vocabulary, and
carries a gold sentiment label backed by a couple of lexicon words.  Word
vectors cluster around a per-topic centre, so embedding distance tracks
topical overlap.  Tokens are pure ASCII letters, which ``clean_text`` leaves
untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, TextRecord
from .embed import EmbeddingTable
from .sentiment import ValenceLexicon
from .stats import RngStream
from .topics import TokenizedDoc


def letters(i: int) -> str:
    """0 -> 'a', 25 -> 'z', 26 -> 'ba' (base 26, no digits)."""
    out = ""
    while True:
        out = chr(ord("a") + i % 26) + out
        i //= 26
        if i == 0:
            return out


def topic_word(topic: int, j: int) -> str:
    return f"t{letters(topic)}q{letters(j)}"


def topic_docs(n_topics: int, docs_per_topic: int = 200, words_per_topic: int = 50,
               tokens_per_doc: int = 8, seed: int = 0) -> tuple[list[TokenizedDoc], np.ndarray]:
    """Disjoint-vocabulary documents and their generating topic labels."""
    rng = RngStream(seed, "synthetic/topics").generator()
    docs, labels = [], []
    for t in range(n_topics):
        for i in range(docs_per_topic):
            words = rng.integers(0, words_per_topic, size=tokens_per_doc)
            docs.append(TokenizedDoc(f"{t}-{i}", tuple(topic_word(t, int(w)) for w in words)))
            labels.append(t)
    return docs, np.asarray(labels)


def purity(assignment: np.ndarray, labels: np.ndarray) -> float:
    """Fraction of documents sharing the majority generating label of their cluster."""
    assignment = np.asarray(assignment)
    labels = np.asarray(labels)
    total = sum(np.bincount(labels[assignment == k]).max() for k in np.unique(assignment))
    return float(total / len(labels))


@dataclass
class SyntheticData:
    corpus: Corpus
    lexicon: ValenceLexicon
    pivot_lexicon: ValenceLexicon
    embeddings: EmbeddingTable
    vocabulary: list[str]
    topics: np.ndarray

    @property
    def lexicons(self) -> dict[str, ValenceLexicon]:
        return {self.lexicon.lang: self.lexicon, self.pivot_lexicon.lang: self.pivot_lexicon}


def make_dataset(n_records: int = 1000, n_topics: int = 10, lang: str = "xx", pivot: str = "en",
                 words_per_topic: int = 50, tokens_per_doc: int = 8, sentiment_words: int = 20,
                 cue_words: int = 2, cue_fidelity: float = 0.85, neutral_share: float = 0.1,
                 dim: int = 16, seed: int = 0) -> SyntheticData:
    """A labelled corpus plus matching lexicons and embedding table.

    Each document holds ``tokens_per_doc`` topic words and ``cue_words``
    sentiment words, each of which agrees with the gold label with
    probability ``cue_fidelity``.  Topics are assigned round-robin, so topic
    sizes differ by at most one.
    """
    rng = RngStream(seed, "synthetic/dataset").generator()
    pos = [f"pos{letters(j)}" for j in range(sentiment_words)]
    neg = [f"neg{letters(j)}" for j in range(sentiment_words)]
    topic_vocab = [[topic_word(t, j) for j in range(words_per_topic)] for t in range(n_topics)]

    records, topics = [], []
    for i in range(n_records):
        t = i % n_topics
        gold = 0 if rng.random() < neutral_share else int(rng.choice([-1, 1]))
        words = [topic_vocab[t][int(j)] for j in rng.integers(0, words_per_topic, size=tokens_per_doc)]
        for _ in range(cue_words):
            agree = rng.random() < cue_fidelity
            polarity = gold if gold != 0 else int(rng.choice([-1, 1]))
            pool = pos if (polarity > 0) == agree else neg
            words.append(pool[int(rng.integers(len(pool)))])
        order = rng.permutation(len(words))
        records.append(TextRecord(f"s{i:05d}", lang, " ".join(words[k] for k in order), label=gold))
        topics.append(t)

    entries = {w: 1 for w in pos} | {w: -1 for w in neg}
    centres = rng.normal(size=(n_topics, dim))
    mapping: dict[str, np.ndarray] = {}
    for t, vocab in enumerate(topic_vocab):
        for w in vocab:
            mapping[w] = centres[t] + 0.5 * rng.normal(size=dim)
    for w in pos + neg:
        mapping[w] = rng.normal(size=dim)

    prov = {"source": f"synthetic(seed={seed})", "clean_rules": "clean/1", "raw_count": n_records,
            "kept": n_records, "dropped": {}, "history": []}
    vocabulary = [w for vocab in topic_vocab for w in vocab] + pos + neg
    return SyntheticData(
        corpus=Corpus(lang, tuple(records), prov),
        lexicon=ValenceLexicon(lang, entries),
        pivot_lexicon=ValenceLexicon(pivot, dict(entries)),
        embeddings=EmbeddingTable.from_mapping(lang, mapping),
        vocabulary=vocabulary,
        topics=np.asarray(topics),
    )


def write_resources(data: SyntheticData, root) -> dict[str, str]:
    """Write lexicons, embeddings and an empty stopword list under ``root``; return the directories."""
    from pathlib import Path

    root = Path(root)
    lex_dir, emb_dir, stop_dir = root / "lexicons", root / "embeddings", root / "stopwords"
    for d in (lex_dir, emb_dir, stop_dir):
        d.mkdir(parents=True, exist_ok=True)
    for lex in (data.lexicon, data.pivot_lexicon):
        lines = [f"{tok}\t{val}" for tok, val in sorted(lex.entries.items())]
        (lex_dir / f"{lex.lang}.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    table = data.embeddings
    lines = [tok + " " + " ".join(repr(float(x)) for x in table.vectors[i]) for tok, i in table.index.items()]
    (emb_dir / f"{table.lang}.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (stop_dir / f"{data.corpus.lang}.txt").write_text("", encoding="utf-8")
    return {"lexicons": str(lex_dir), "embeddings": str(emb_dir), "stopwords": str(stop_dir)}
