"""GSDMM short-text clustering with fold-in classification of backtranslated texts.

The sampler is the collapsed Gibbs sampler for the Dirichlet Multinomial
Mixture (Yin & Wang, KDD 2014).  With the document removed from the counts,
cluster ``k`` is drawn with weight

    (m_k + alpha) * prod_w prod_{j=1..c_w} (n_kw + beta + j - 1)
                  / prod_{i=1..L} (n_k + V*beta + i - 1)

where ``c_w`` is the count of word ``w`` in the document and ``L`` its
length.  Weights are evaluated in log space; the inner products collapse to
differences of log-gamma values.

Serialized model layout (JSON, ``format = "btvalid-gsdmm/1"``)::

    K, alpha, beta, V, seed, iterations
    vocab        list of V tokens; a word id is its index
    m            list of K document counts
    n            list of K token counts
    nw           list of K sparse rows, each a list of [word_id, count], ascending id
    doc_ids      training document ids, in fitting order
    assignment   cluster of each training document, aligned with doc_ids
"""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.special import gammaln

from .stats import RngStream
from .tokens import has_pictographic, tokenize

log = logging.getLogger(__name__)

DEFAULT_KS = (2, 5, 10, 15, 20, 50, 100, 150, 200)
MODEL_FORMAT = "btvalid-gsdmm/1"


@dataclass(frozen=True)
class TokenizedDoc:
    id: str
    tokens: tuple[str, ...]

    def __bool__(self) -> bool:
        return bool(self.tokens)


def preprocess_for_topics(text: str, stopwords: Iterable[str] | None = None, record_id: str = "") -> TokenizedDoc:
    stop = stopwords if isinstance(stopwords, (set, frozenset)) else set(stopwords or ())
    tokens = tuple(t for t in tokenize(text) if t not in stop and not has_pictographic(t))
    return TokenizedDoc(record_id, tokens)


def load_stopwords(path: str | Path) -> frozenset[str]:
    words = (line.strip().lower() for line in Path(path).read_text(encoding="utf-8").splitlines())
    return frozenset(w for w in words if w and not w.startswith("#"))


def load_stopword_dir(directory: str | Path) -> dict[str, frozenset[str]]:
    """Every ``<lang>.txt`` in ``directory``."""
    return {p.stem: load_stopwords(p) for p in sorted(Path(directory).glob("*.txt"))}


# ---------------------------------------------------------------------------
# model

@dataclass
class TopicModel:
    K: int
    alpha: float
    beta: float
    vocab: list[str]
    m: np.ndarray           # (K,) documents per cluster
    n: np.ndarray           # (K,) tokens per cluster
    nw: np.ndarray          # (K, V) token counts per cluster
    assignment: np.ndarray  # (D,) cluster of each training doc
    doc_ids: list[str]
    seed: int = 0
    iterations: int = 0
    _index: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    @property
    def V(self) -> int:
        return len(self.vocab)

    @property
    def D(self) -> int:
        return len(self.doc_ids)

    def word_index(self) -> dict[str, int]:
        if len(self._index) != len(self.vocab):
            self._index = {w: i for i, w in enumerate(self.vocab)}
        return self._index

    def cluster_of(self) -> dict[str, int]:
        return dict(zip(self.doc_ids, (int(z) for z in self.assignment)))

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "K": self.K,
            "alpha": self.alpha,
            "beta": self.beta,
            "V": self.V,
            "seed": self.seed,
            "iterations": self.iterations,
            "vocab": list(self.vocab),
            "m": [int(x) for x in self.m],
            "n": [int(x) for x in self.n],
            "nw": [[[int(w), int(row[w])] for w in np.flatnonzero(row)] for row in self.nw],
            "doc_ids": list(self.doc_ids),
            "assignment": [int(z) for z in self.assignment],
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "TopicModel":
        if data.get("format") != MODEL_FORMAT:
            raise ValueError(f"not a {MODEL_FORMAT} model")
        K, V = int(data["K"]), int(data["V"])
        nw = np.zeros((K, V), dtype=np.int64)
        for k, row in enumerate(data["nw"]):
            for w, c in row:
                nw[k, w] = c
        return cls(K, float(data["alpha"]), float(data["beta"]), list(data["vocab"]),
                   np.asarray(data["m"], dtype=np.int64), np.asarray(data["n"], dtype=np.int64), nw,
                   np.asarray(data["assignment"], dtype=np.int64), list(data["doc_ids"]),
                   int(data["seed"]), int(data["iterations"]))


def save_model(model: TopicModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), ensure_ascii=False, separators=(",", ":")), encoding="utf-8")


def load_model(path: str | Path) -> TopicModel:
    return TopicModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


# ---------------------------------------------------------------------------
# sampler

def _encode(tokens: Sequence[str], index: Mapping[str, int]) -> tuple[np.ndarray, np.ndarray, int]:
    counts = Counter(index[t] for t in tokens if t in index)
    ids = np.fromiter(counts.keys(), dtype=np.int64, count=len(counts))
    cnt = np.fromiter(counts.values(), dtype=np.float64, count=len(counts))
    return ids, cnt, int(cnt.sum())


def log_weights(m: np.ndarray, n: np.ndarray, nw: np.ndarray, ids: np.ndarray, cnt: np.ndarray,
                length: int, alpha: float, beta: float, V: int) -> np.ndarray:
    """Unnormalized log conditional of every cluster for one document (counts exclude the doc)."""
    out = np.log(m + alpha)
    if length:
        nkw = nw[:, ids] + beta
        out = out + (gammaln(nkw + cnt) - gammaln(nkw)).sum(axis=1)
        nk = n + V * beta
        out = out - (gammaln(nk + length) - gammaln(nk))
    return out


def counts_from_assignments(encoded: Sequence[tuple[np.ndarray, np.ndarray, int]], assignment: np.ndarray,
                            K: int, V: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = np.zeros(K, dtype=np.int64)
    n = np.zeros(K, dtype=np.int64)
    nw = np.zeros((K, V), dtype=np.int64)
    for (ids, cnt, length), z in zip(encoded, assignment):
        m[z] += 1
        n[z] += length
        nw[z, ids] += cnt.astype(np.int64)
    return m, n, nw


def rebuild_counts(model: TopicModel, docs: Sequence[TokenizedDoc]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Count tables implied by ``model.assignment`` over the training ``docs``."""
    index = model.word_index()
    return counts_from_assignments([_encode(d.tokens, index) for d in docs], model.assignment, model.K, model.V)


class CountInvariantError(AssertionError):
    pass


def check_counts(model: TopicModel) -> None:
    if model.m.sum() != model.D:
        raise CountInvariantError(f"sum of m is {model.m.sum()}, expected {model.D} documents")
    if (model.m < 0).any() or (model.nw < 0).any() or (model.n < 0).any():
        raise CountInvariantError("negative count")
    if not np.array_equal(model.nw.sum(axis=1), model.n):
        raise CountInvariantError("row sums of nw differ from n")


def gsdmm_fit(docs: Sequence[TokenizedDoc], K: int, alpha: float = 0.1, beta: float = 0.1,
              iterations: int = 5, seed: int = 0, stream: RngStream | None = None,
              check: bool = False) -> TopicModel:
    """Fit GSDMM with ``iterations`` full Gibbs sweeps from a uniform random start.

    ``check=True`` verifies count conservation after every sweep.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    if not docs:
        raise ValueError("no documents to cluster")
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    if iterations < 0:
        raise ValueError("iterations must be non-negative")
    ids = [d.id for d in docs]
    if len(set(ids)) != len(ids):
        raise ValueError("document ids must be unique")
    empty = [d.id for d in docs if not d.tokens]
    if empty:
        raise ValueError(f"{len(empty)} documents have no tokens (first: {empty[0]!r}); filter them out first")

    vocab: list[str] = []
    index: dict[str, int] = {}
    for d in docs:
        for t in d.tokens:
            if t not in index:
                index[t] = len(vocab)
                vocab.append(t)
    V = len(vocab)
    encoded = [_encode(d.tokens, index) for d in docs]

    rng = (stream or RngStream(seed, f"gsdmm/K{K}")).generator()
    assignment = rng.integers(0, K, size=len(docs)).astype(np.int64)
    m, n, nw = counts_from_assignments(encoded, assignment, K, V)
    model = TopicModel(K, float(alpha), float(beta), vocab, m, n, nw, assignment, ids, seed, 0, index)

    for _ in range(iterations):
        for d, (wid, cnt, length) in enumerate(encoded):
            z = assignment[d]
            m[z] -= 1
            n[z] -= length
            nw[z, wid] -= cnt.astype(np.int64)
            if K == 1:
                z = 0
            else:
                logw = log_weights(m, n, nw, wid, cnt, length, alpha, beta, V)
                w = np.exp(logw - logw.max())
                cdf = np.cumsum(w)
                z = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), K - 1)
            assignment[d] = z
            m[z] += 1
            n[z] += length
            nw[z, wid] += cnt.astype(np.int64)
        model.iterations += 1
        if check:
            check_counts(model)
    return model


def gsdmm_classify(model: TopicModel, doc: TokenizedDoc | Sequence[str]) -> int:
    """Fold-in: argmax of the conditional against the fitted counts, which stay untouched.

    Out-of-vocabulary tokens are ignored; a document with no known token
    falls back to the largest prior ``m_k + alpha``.  Ties go to the lowest
    cluster index.
    """
    tokens = doc.tokens if isinstance(doc, TokenizedDoc) else doc
    wid, cnt, length = _encode(tokens, model.word_index())
    logw = log_weights(model.m, model.n, model.nw, wid, cnt, length, model.alpha, model.beta, model.V)
    return int(np.argmax(logw))


# ---------------------------------------------------------------------------
# evaluation

@dataclass(frozen=True)
class MatchResult:
    rate: float
    matched: int
    aligned: int


def match_details(model: TopicModel, back_docs: Sequence[TokenizedDoc]) -> MatchResult:
    """Agreement between fold-in clusters of ``back_docs`` and the clusters of their originals.

    Back documents are aligned by id; empty ones are left out of the denominator.
    """
    cluster = model.cluster_of()
    matched = aligned = 0
    for doc in back_docs:
        if doc.id not in cluster or not doc.tokens:
            continue
        aligned += 1
        matched += gsdmm_classify(model, doc) == cluster[doc.id]
    if not aligned:
        raise ValueError("no backtranslated document aligns with a training document")
    return MatchResult(matched / aligned, matched, aligned)


def match_rate(model: TopicModel, back_docs: Sequence[TokenizedDoc]) -> float:
    return match_details(model, back_docs).rate


@dataclass(frozen=True)
class NullResult:
    mean: float
    samples: np.ndarray
    std_error: float

    @staticmethod
    def analytic(assignments: Sequence[int]) -> float:
        """Expected agreement under permutation, sum over clusters of (m_k / D)^2."""
        sizes = np.bincount(np.asarray(assignments, dtype=np.int64))
        shares = sizes / sizes.sum()
        return float((shares ** 2).sum())


def permutation_null(assignments: Sequence[int], permutations: int = 1000, seed: int = 0,
                     stream: RngStream | None = None) -> NullResult:
    """Agreement of the assignment list with uniformly permuted copies of itself."""
    a = np.asarray(assignments)
    if a.size == 0:
        raise ValueError("empty assignment list")
    if permutations < 1:
        raise ValueError("permutations must be >= 1")
    rng = (stream or RngStream(seed, "topics/null")).generator()
    samples = np.fromiter((np.mean(rng.permutation(a) == a) for _ in range(permutations)),
                          dtype=float, count=permutations)
    se = float(samples.std(ddof=1) / np.sqrt(permutations)) if permutations > 1 else float("nan")
    return NullResult(float(samples.mean()), samples, se)


@dataclass(frozen=True)
class SweepRow:
    K: int
    match_rate: float
    null_mean: float
    null_se: float
    matched: int
    aligned: int

    def to_dict(self) -> dict:
        return {"K": self.K, "match_rate": self.match_rate, "null_mean": self.null_mean,
                "null_se": self.null_se, "matched": self.matched, "aligned": self.aligned}


def k_sweep(docs: Sequence[TokenizedDoc], back_docs: Sequence[TokenizedDoc], Ks: Sequence[int] = DEFAULT_KS,
            alpha: float = 0.1, beta: float = 0.1, iterations: int = 5, permutations: int = 1000,
            seed: int = 0, models: dict[int, TopicModel] | None = None) -> list[SweepRow]:
    """One fit, match rate and permutation null per cluster count.

    Streams are labelled by K, so each row is reproducible on its own.  Pass
    a dict as ``models`` to collect the fitted models.
    """
    rows = []
    for K in Ks:
        model = gsdmm_fit(docs, K, alpha, beta, iterations, seed, stream=RngStream(seed, f"topics/fit/K{K}"))
        res = match_details(model, back_docs)
        null = permutation_null(model.assignment, permutations, stream=RngStream(seed, f"topics/null/K{K}"))
        rows.append(SweepRow(K, res.rate, null.mean, null.std_error, res.matched, res.aligned))
        if models is not None:
            models[K] = model
    return rows


def topic_report(corpus, stopwords: Iterable[str] | None, Ks: Sequence[int] = DEFAULT_KS,
                 alpha: float = 0.1, beta: float = 0.1, iterations: int = 5, permutations: int = 1000,
                 seed: int = 0) -> dict:
    """Original vs backtranslated topic agreement for one corpus.

    Only records whose original and backtranslation both survive
    preprocessing take part.  A missing stopword list is not an error; the
    result carries ``stopwords: false``.
    """
    stop = set(stopwords) if stopwords is not None else set()
    orig, back = [], []
    empty_original = empty_back = 0
    for rec in corpus:
        if rec.text_back is None:
            continue
        o = preprocess_for_topics(rec.text_original, stop, rec.id)
        b = preprocess_for_topics(rec.text_back, stop, rec.id)
        if not o.tokens:
            empty_original += 1
            continue
        if not b.tokens:
            empty_back += 1
            continue
        orig.append(o)
        back.append(b)
    if not orig:
        raise ValueError(f"{corpus.lang}: no document survives topic preprocessing")
    rows = k_sweep(orig, back, Ks, alpha, beta, iterations, permutations, seed)
    return {
        "rows": [r.to_dict() for r in rows],
        "stopwords": stopwords is not None,
        "documents": len(orig),
        "excluded_empty_original": empty_original,
        "excluded_empty_back": empty_back,
    }
