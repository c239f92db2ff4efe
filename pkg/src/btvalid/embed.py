"""Sentence embeddings as normalized sums of word vectors, and distance baselines."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .stats import RngStream
from .tokens import tokenize

log = logging.getLogger(__name__)


class EmbeddingFormatError(ValueError):
    pass


@dataclass
class EmbeddingTable:
    lang: str
    dim: int | None
    vectors: np.ndarray                      # (n_tokens, dim), float64
    index: dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.index)

    def __contains__(self, token: str) -> bool:
        return token in self.index

    def vector(self, token: str) -> np.ndarray:
        return self.vectors[self.index[token]]

    @classmethod
    def from_mapping(cls, lang: str, mapping: Mapping[str, Sequence[float]]) -> "EmbeddingTable":
        tokens = list(mapping)
        if not tokens:
            return cls(lang, None, np.zeros((0, 0)), {})
        mat = np.asarray([mapping[t] for t in tokens], dtype=np.float64)
        if mat.ndim != 2:
            raise EmbeddingFormatError("vectors differ in length")
        return cls(lang, mat.shape[1], mat, {t: i for i, t in enumerate(tokens)})


def load_embeddings(path: str | Path, lang: str | None = None) -> EmbeddingTable:
    """Read the word-per-line text layout: ``token v1 v2 ... vd``.

    A first line of exactly two integers (the word2vec ``count dim`` header)
    is skipped.  Unparseable lines are skipped with a warning; a vector whose
    length differs from the first one is fatal.  Repeated tokens keep the
    first vector.
    """
    path = Path(path)
    tokens: list[str] = []
    rows: list[list[float]] = []
    index: dict[str, int] = {}
    dim: int | None = None
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            parts = line.split()
            if not parts:
                continue
            if lineno == 1 and len(parts) == 2 and all(p.isdigit() for p in parts):
                continue
            if len(parts) < 2:
                log.warning("%s:%d: no vector, line skipped", path, lineno)
                continue
            try:
                vec = [float(x) for x in parts[1:]]
            except ValueError:
                log.warning("%s:%d: unparseable vector, line skipped", path, lineno)
                continue
            if dim is None:
                dim = len(vec)
            elif len(vec) != dim:
                raise EmbeddingFormatError(f"{path}:{lineno}: vector has {len(vec)} components, expected {dim}")
            tok = parts[0]
            if tok in index:
                log.warning("%s:%d: duplicate token %r, keeping the first vector", path, lineno, tok)
                continue
            index[tok] = len(tokens)
            tokens.append(tok)
            rows.append(vec)
    mat = np.asarray(rows, dtype=np.float64) if rows else np.zeros((0, 0))
    return EmbeddingTable(lang or path.stem, dim, mat, index)


def load_embedding_dir(directory: str | Path) -> dict[str, EmbeddingTable]:
    """Every ``<lang>.txt`` or ``<lang>.vec`` in ``directory``."""
    paths = sorted(p for p in Path(directory).iterdir() if p.suffix in (".txt", ".vec"))
    return {p.stem: load_embeddings(p) for p in paths}


@dataclass(frozen=True)
class SentenceVector:
    id: str
    vector: np.ndarray | None
    in_vocab_count: int

    @property
    def defined(self) -> bool:
        return self.vector is not None


def embed_sentence(tokens: Sequence[str], table: EmbeddingTable, record_id: str = "") -> SentenceVector:
    """Unit-normalized sum of the in-vocabulary word vectors; undefined when none is known."""
    if table.dim is None:
        raise ValueError(f"embedding table {table.lang!r} is empty")
    rows = [table.index[t] for t in tokens if t in table.index]
    if not rows:
        return SentenceVector(record_id, None, 0)
    # Sum in sorted row order so token order cannot change the floating-point result.
    total = table.vectors[sorted(rows)].sum(axis=0)
    norm = np.linalg.norm(total)
    if norm == 0.0:
        return SentenceVector(record_id, None, len(rows))
    return SentenceVector(record_id, total / norm, len(rows))


def _as_array(u: SentenceVector | np.ndarray | Sequence[float]) -> np.ndarray:
    if isinstance(u, SentenceVector):
        if u.vector is None:
            raise ValueError(f"sentence vector {u.id!r} is undefined")
        return u.vector
    return np.asarray(u, dtype=np.float64)


def cosine_distance(u, v) -> float:
    """``1 - cos(u, v)``, clipped to [0, 2]; exactly 0 for equal vectors."""
    a, b = _as_array(u), _as_array(v)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    if np.array_equal(a, b):
        return 0.0
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine distance of a zero vector is undefined")
    return float(min(2.0, max(0.0, 1.0 - float(a @ b) / (na * nb))))


@dataclass(frozen=True)
class BackDistances:
    per_id: dict[str, float]
    mean: float
    excluded: int


def backtranslation_distances(corpus: Corpus, table: EmbeddingTable,
                              tokenizer: Callable[[str], list[str]] = tokenize) -> BackDistances:
    """Distance between each original and its backtranslation in the source-language space."""
    per_id: dict[str, float] = {}
    excluded = 0
    for rec in corpus:
        if rec.text_back is None:
            excluded += 1
            continue
        u = embed_sentence(tokenizer(rec.text_original), table, rec.id)
        v = embed_sentence(tokenizer(rec.text_back), table, rec.id)
        if not (u.defined and v.defined):
            excluded += 1
            continue
        per_id[rec.id] = cosine_distance(u, v)
    if not per_id:
        raise ValueError(f"{corpus.lang}: every record was excluded from embedding distances")
    return BackDistances(per_id, float(np.mean(list(per_id.values()))), excluded)


@dataclass(frozen=True)
class Baselines:
    min_baseline: float
    mean_baseline: float
    peers: int
    anchors: int


def _distances(anchor: np.ndarray, others: np.ndarray) -> np.ndarray:
    d = 1.0 - others @ anchor
    d[np.all(others == anchor, axis=1)] = 0.0
    return np.clip(d, 0.0, 2.0)


def peer_baselines(vectors: Sequence[SentenceVector] | np.ndarray, peers: int = 5000,
                   seed: int = 0, stream: RngStream | None = None) -> Baselines:
    """Average over anchors of the minimum and mean distance to ``peers`` other sentences.

    Peers are drawn per anchor without replacement, never the anchor itself.
    When fewer than ``peers + 1`` sentences are available the peer count is
    clamped with a warning; at ``peers = N - 1`` every other sentence is used
    and no randomness is involved.
    """
    if isinstance(vectors, np.ndarray):
        mat = np.asarray(vectors, dtype=np.float64)
        norms = np.linalg.norm(mat, axis=1, keepdims=True)
        if (norms == 0).any():
            raise ValueError("zero vector among the sentences")
        mat = mat / norms
    else:
        mat = np.asarray([v.vector for v in vectors if v.defined], dtype=np.float64)
    N = len(mat)
    if N < 2:
        raise ValueError(f"need at least 2 embeddable records for peer baselines, got {N}")
    if peers < 1:
        raise ValueError("peers must be >= 1")
    if peers > N - 1:
        warnings.warn(f"only {N} embeddable records; peer count clamped from {peers} to {N - 1}", stacklevel=2)
        peers = N - 1
    rng = (stream or RngStream(seed, "embed/peers")).generator()
    minima = np.empty(N)
    means = np.empty(N)
    everyone = np.arange(N)
    for i in range(N):
        if peers == N - 1:
            idx = np.delete(everyone, i)
        else:
            idx = rng.choice(N - 1, size=peers, replace=False)
            idx[idx >= i] += 1
        d = _distances(mat[i], mat[idx])
        minima[i] = d.min()
        means[i] = d.mean()
    return Baselines(float(minima.mean()), float(means.mean()), peers, N)


@dataclass(frozen=True)
class Verdict:
    passes_min: bool
    passes_mean: bool


def embedding_verdict(mean_back_distance: float, baselines: Baselines | Mapping[str, float]) -> Verdict:
    if isinstance(baselines, Baselines):
        lo, hi = baselines.min_baseline, baselines.mean_baseline
    else:
        lo, hi = baselines["min_baseline"], baselines["mean_baseline"]
    return Verdict(mean_back_distance < lo, mean_back_distance < hi)


def embedding_report(corpus: Corpus, table: EmbeddingTable, peers: int = 5000, seed: int = 0) -> dict:
    back = backtranslation_distances(corpus, table)
    sentences = [embed_sentence(tokenize(r.text_original), table, r.id) for r in corpus]
    defined = [s for s in sentences if s.defined]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        base = peer_baselines(defined, peers, stream=RngStream(seed, f"embed/peers/{corpus.lang}"))
    for w in caught:
        log.warning("embed %s: %s", corpus.lang, w.message)
    verdict = embedding_verdict(back.mean, base)
    return {
        "mean_back_distance": back.mean,
        "min_baseline": base.min_baseline,
        "mean_baseline": base.mean_baseline,
        "passes_min": verdict.passes_min,
        "passes_mean": verdict.passes_mean,
        "peers": base.peers,
        "excluded_counts": {"back_distance": back.excluded, "baseline": len(sentences) - len(defined)},
    }
