"""Dictionary-valence sentiment scoring and bootstrapped accuracy against gold labels."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .corpus import Corpus
from .stats import IntervalSummary, RngStream, bootstrap
from .tokens import tokenize

log = logging.getLogger(__name__)

NEUTRAL_RULES = ("none", "gold", "predicted", "both")


class UndefinedMetric(ValueError):
    """Raised when a metric has nothing to evaluate (e.g. every item excluded as neutral)."""


@dataclass(frozen=True)
class ValenceLexicon:
    lang: str
    entries: Mapping[str, int]

    def __post_init__(self) -> None:
        for tok, val in self.entries.items():
            if val not in (-1, 0, 1):
                raise ValueError(f"lexicon {self.lang}: {tok!r} has valence {val!r}")
            if tok != tok.lower():
                raise ValueError(f"lexicon {self.lang}: token {tok!r} is not lowercase")

    def negated(self) -> "ValenceLexicon":
        return ValenceLexicon(self.lang, {t: -v for t, v in self.entries.items()})


def load_lexicon(path: str | Path, lang: str | None = None) -> ValenceLexicon:
    """Read ``token<TAB>valence`` lines; blank lines and ``#`` comments are skipped."""
    path = Path(path)
    entries: dict[str, int] = {}
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected token<TAB>valence")
            try:
                val = int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: valence {parts[1]!r} is not an integer") from None
            if val not in (-1, 0, 1):
                raise ValueError(f"{path}:{lineno}: valence {val} outside {{-1, 0, 1}}")
            entries.setdefault(parts[0].strip().lower(), val)
    return ValenceLexicon(lang or path.stem, entries)


def load_lexicons(directory: str | Path) -> dict[str, ValenceLexicon]:
    """Every ``<lang>.tsv`` in ``directory``."""
    return {p.stem: load_lexicon(p) for p in sorted(Path(directory).glob("*.tsv"))}


@dataclass(frozen=True)
class SentimentResult:
    id: str
    polarity: float
    label: int
    scored_word_count: int


def score_text(text: str, lexicon: ValenceLexicon, record_id: str = "",
               tokenizer: Callable[[str], list[str]] = tokenize) -> SentimentResult:
    """Polarity ``(P - N) / max(1, P + N)`` from counts of positive and negative tokens."""
    pos = neg = 0
    for tok in tokenizer(text):
        v = lexicon.entries.get(tok, 0)
        if v > 0:
            pos += 1
        elif v < 0:
            neg += 1
    polarity = (pos - neg) / max(1, pos + neg)
    label = (polarity > 0) - (polarity < 0)
    return SentimentResult(record_id, polarity, label, pos + neg)


def _rule(exclude_neutral: bool | str) -> str:
    if exclude_neutral is True:
        return "both"
    if exclude_neutral is False:
        return "none"
    if exclude_neutral not in NEUTRAL_RULES:
        raise ValueError(f"exclude_neutral must be a bool or one of {NEUTRAL_RULES}")
    return exclude_neutral


def correctness(predictions: Sequence[SentimentResult | int], gold: Sequence[int],
                exclude_neutral: bool | str = True) -> np.ndarray:
    """0/1 match indicator over the evaluable items.

    ``exclude_neutral`` is ``True``/``"both"`` (drop items that are neutral in
    gold or prediction), ``"gold"``, ``"predicted"`` or ``False``/``"none"``.
    """
    if len(predictions) != len(gold):
        raise ValueError(f"{len(predictions)} predictions for {len(gold)} gold labels")
    rule = _rule(exclude_neutral)
    hits = []
    for p, g in zip(predictions, gold):
        p = p.label if isinstance(p, SentimentResult) else p
        if rule in ("gold", "both") and g == 0:
            continue
        if rule in ("predicted", "both") and p == 0:
            continue
        hits.append(p == g)
    if not hits:
        raise UndefinedMetric("no evaluable items after neutral exclusion")
    return np.asarray(hits, dtype=float)


def accuracy(predictions: Sequence[SentimentResult | int], gold: Sequence[int],
             exclude_neutral: bool | str = True) -> float:
    return float(correctness(predictions, gold, exclude_neutral).mean())


def bootstrap_accuracy(predictions: Sequence[SentimentResult | int], gold: Sequence[int],
                       replicates: int = 1000, seed: int = 0, exclude_neutral: bool | str = True,
                       level: float = 0.99, stream: RngStream | None = None) -> IntervalSummary:
    """Median and percentile interval of accuracy over item-level bootstrap resamples."""
    hits = correctness(predictions, gold, exclude_neutral)
    stream = stream or RngStream(seed, "sentiment")
    return bootstrap(hits, np.mean, replicates, level, stream, vectorized=True)


# ---------------------------------------------------------------------------
# per-corpus report

@dataclass(frozen=True)
class VariantSummary:
    n_evaluable: int
    summary: IntervalSummary

    def to_dict(self) -> dict:
        return {
            "n_evaluable": self.n_evaluable,
            "median": self.summary.median,
            "hci99_low": self.summary.low,
            "hci99_high": self.summary.high,
        }


def variant_hits(corpus: Corpus, lexicons: Mapping[str, ValenceLexicon], pivot: str,
                 exclude_neutral: bool | str = True) -> dict[str, np.ndarray]:
    """0/1 correctness per variant; a variant with no evaluable item maps to an empty array."""
    labelled = [r for r in corpus if r.label is not None]
    if not labelled:
        raise UndefinedMetric(f"{corpus.lang}: no gold labels")
    out: dict[str, np.ndarray] = {}
    for variant, lex_lang in (("original", corpus.lang), ("pivot", pivot), ("back", corpus.lang)):
        recs = [r for r in labelled if r.text(variant) is not None]
        lex = lexicons[lex_lang]
        preds = [score_text(r.text(variant), lex, r.id) for r in recs]
        try:
            out[variant] = correctness(preds, [r.label for r in recs], exclude_neutral)
        except UndefinedMetric:
            out[variant] = np.empty(0)
    return out


def _summarize(hits: np.ndarray, replicates: int, stream: RngStream, level: float) -> VariantSummary | None:
    if hits.size == 0:
        return None
    return VariantSummary(int(hits.size), bootstrap(hits, np.mean, replicates, level, stream, vectorized=True))


def sentiment_report(corpora: Corpus | Iterable[Corpus], lexicons: Mapping[str, ValenceLexicon],
                     pivot: str = "en", replicates: int = 1000, seed: int = 0,
                     exclude_neutral: bool | str = True, level: float = 0.99) -> dict:
    """Bootstrapped accuracy for original, pivot and backtranslated text, per language and pooled.

    All variants of one language share one random stream, so identical
    correctness vectors give identical summaries.  Pooling concatenates the
    evaluable items of every language before resampling.  Languages missing a
    lexicon are skipped with a warning and listed under ``skipped``.
    """
    if isinstance(corpora, Corpus):
        corpora = [corpora]
    per_lang: dict[str, dict[str, VariantSummary | None]] = {}
    pooled_hits: dict[str, list[np.ndarray]] = {"original": [], "pivot": [], "back": []}
    skipped: dict[str, str] = {}
    for corpus in sorted(corpora, key=lambda c: c.lang):
        missing = [lang for lang in (corpus.lang, pivot) if lang not in lexicons]
        if missing:
            log.warning("sentiment: skipping %s, no lexicon for %s", corpus.lang, ", ".join(missing))
            skipped[corpus.lang] = f"missing lexicon: {', '.join(missing)}"
            continue
        try:
            hits = variant_hits(corpus, lexicons, pivot, exclude_neutral)
        except UndefinedMetric as exc:
            log.warning("sentiment: skipping %s: %s", corpus.lang, exc)
            skipped[corpus.lang] = str(exc)
            continue
        stream = RngStream(seed, f"sentiment/{corpus.lang}")
        per_lang[corpus.lang] = {v: _summarize(h, replicates, stream, level) for v, h in hits.items()}
        for v, h in hits.items():
            pooled_hits[v].append(h)
    pooled = {}
    for v, parts in pooled_hits.items():
        joined = np.concatenate(parts) if parts else np.empty(0)
        pooled[v] = _summarize(joined, replicates, RngStream(seed, "sentiment/pooled"), level)
    return {"languages": per_lang, "pooled": pooled, "skipped": skipped,
            "exclude_neutral": _rule(exclude_neutral), "replicates": replicates, "level": level}
