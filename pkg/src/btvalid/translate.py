"""Round-trip translation through a pivot language.

Providers translate batches of strings; :func:`translate_batch` adds the
content-addressed on-disk cache, bounded concurrency and retry with
exponential backoff.  Three providers ship with the toolkit: the public
Google v2 REST endpoint, an identity provider and a seeded token-noise
provider used as a controllable stand-in for translation drift.
"""

from __future__ import annotations

import hashlib
import logging
import os
import random
import re
import tempfile
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

import requests

from .corpus import Corpus, write_corpus
from .stats import RngStream

log = logging.getLogger(__name__)

GOOGLE_V2_ENDPOINT = "https://translation.googleapis.com/language/translate/v2"
USD_PER_MILLION_CHARS = 20.0


class TranslationError(RuntimeError):
    pass


class AuthenticationError(TranslationError):
    pass


class TransientError(TranslationError):
    """Retryable failure: HTTP 429, 5xx, timeouts, dropped connections."""


class RateLimitExhausted(TranslationError):
    def __init__(self, message: str, completed: int = 0, pending: int = 0):
        super().__init__(message)
        self.completed = completed
        self.pending = pending


class Provider:
    """Base class.  ``translate`` returns one string per input, or ``None`` for an item that failed."""

    name = "provider"

    def translate(self, texts: Sequence[str], source: str, target: str) -> list[str | None]:
        raise NotImplementedError


class IdentityProvider(Provider):
    name = "identity"

    def translate(self, texts, source, target):
        return list(texts)


class NoiseProvider(Provider):
    """Replace each whitespace token, independently with probability ``rate``, by a vocabulary token.

    Replacements never repeat a token already present in the input text
    (unless the vocabulary offers nothing else).  Randomness is derived from
    ``(seed, source, target, text)`` only, so output does not depend on batch
    composition or scheduling, and two providers that differ only in rate
    share their random draws: whatever a lower rate replaces, a higher rate
    replaces identically.
    """

    def __init__(self, rate: float, vocabulary: Sequence[str] | Mapping[str, Sequence[str]], seed: int = 0):
        if not 0.0 <= rate <= 1.0:
            raise ValueError(f"noise rate must lie in [0, 1], got {rate}")
        self.rate = float(rate)
        self.seed = seed
        if isinstance(vocabulary, Mapping):
            self._vocab = {lang: sorted(set(v)) for lang, v in vocabulary.items()}
        else:
            self._vocab = {"*": sorted(set(vocabulary))}
        if not any(self._vocab.values()):
            raise ValueError("noise provider needs a non-empty vocabulary")
        h = hashlib.sha256()
        for lang in sorted(self._vocab):
            h.update(lang.encode() + b"\0" + "\0".join(self._vocab[lang]).encode("utf-8") + b"\1")
        self.name = f"noise-r{self.rate:g}-s{seed}-v{h.hexdigest()[:12]}"

    def vocabulary(self, lang: str) -> list[str]:
        vocab = self._vocab.get(lang) or self._vocab.get("*")
        if not vocab:
            raise KeyError(f"noise provider has no vocabulary for {lang!r}")
        return vocab

    def _noisy(self, text: str, source: str, target: str) -> str:
        tokens = text.split()
        if not tokens:
            return text
        vocab = self.vocabulary(target)
        present = set(tokens)
        digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
        rng = RngStream(self.seed, f"noise/{source}/{target}/{digest}").generator()
        u = rng.random(len(tokens))
        exclusive = any(w not in present for w in vocab)
        picks = []
        for _ in tokens:
            while True:
                w = vocab[int(rng.integers(len(vocab)))]
                if not exclusive or w not in present:
                    break
            picks.append(w)
        if not (u < self.rate).any():
            return text
        return " ".join(p if ui < self.rate else t for t, p, ui in zip(tokens, picks, u))

    def translate(self, texts, source, target):
        return [self._noisy(t, source, target) for t in texts]


class GoogleProvider(Provider):
    """Google Cloud Translation v2 over plain HTTPS (``POST .../language/translate/v2``)."""

    name = "google"

    def __init__(self, api_key: str | None = None, endpoint: str = GOOGLE_V2_ENDPOINT,
                 session: requests.Session | None = None, timeout: float = 30.0):
        self.api_key = api_key or os.environ.get("TRANSLATE_API_KEY")
        if not self.api_key:
            raise AuthenticationError("no API key: set TRANSLATE_API_KEY or pass api_key")
        self.endpoint = endpoint
        self.session = session or requests.Session()
        self.timeout = timeout

    def translate(self, texts, source, target):
        payload = [("q", t) for t in texts]
        payload += [("source", source), ("target", target), ("format", "text"), ("key", self.api_key)]
        try:
            resp = self.session.post(self.endpoint, data=payload, timeout=self.timeout)
        except (requests.Timeout, requests.ConnectionError) as exc:
            raise TransientError(f"network error: {exc}") from exc
        status = resp.status_code
        if status in (401, 403):
            raise AuthenticationError(f"translation API rejected credentials (HTTP {status})")
        if status == 429 or status >= 500:
            raise TransientError(f"translation API returned HTTP {status}")
        if status != 200:
            log.error("translation API returned HTTP %d for a batch of %d; items marked failed", status, len(texts))
            return [None] * len(texts)
        try:
            items = resp.json()["data"]["translations"]
            out = [item.get("translatedText") for item in items]
        except (ValueError, KeyError, TypeError, AttributeError):
            log.error("unparseable translation response; %d items marked failed", len(texts))
            return [None] * len(texts)
        if len(out) != len(texts):
            log.error("translation response has %d items for %d inputs; batch marked failed", len(out), len(texts))
            return [None] * len(texts)
        return out


def make_provider(name: str, *, api_key: str | None = None, noise_rate: float = 0.0,
                  vocabulary: Sequence[str] | Mapping[str, Sequence[str]] | None = None,
                  seed: int = 0) -> Provider:
    if name == "identity":
        return IdentityProvider()
    if name == "noise":
        if vocabulary is None:
            raise ValueError("the noise provider needs a vocabulary")
        return NoiseProvider(noise_rate, vocabulary, seed=seed)
    if name == "google":
        return GoogleProvider(api_key=api_key)
    raise KeyError(f"unknown provider {name!r}; choose google, identity or noise")


# ---------------------------------------------------------------------------
# cache

@dataclass(frozen=True)
class TranslationCacheKey:
    provider: str
    source: str
    target: str
    digest: str

    @classmethod
    def of(cls, provider: str, source: str, target: str, text: str) -> "TranslationCacheKey":
        return cls(provider, source, target, hashlib.sha256(text.encode("utf-8")).hexdigest())


_UNSAFE = re.compile(r"[^A-Za-z0-9._-]+")


class TranslationCache:
    """Content-addressed store: ``<root>/<provider>/<source>-<target>/<sha[:2]>/<sha256>.txt``.

    Each value is the UTF-8 translation of the text whose SHA-256 names the
    file.  Writes go through a temporary file and an atomic rename, so an
    interrupted run never leaves a truncated entry.
    """

    def __init__(self, root: str | Path):
        self.root = Path(root)
        self._lock = threading.Lock()

    def path(self, key: TranslationCacheKey) -> Path:
        provider = _UNSAFE.sub("_", key.provider)
        return self.root / provider / f"{key.source}-{key.target}" / key.digest[:2] / f"{key.digest}.txt"

    def get(self, key: TranslationCacheKey) -> str | None:
        p = self.path(key)
        try:
            return p.read_text(encoding="utf-8")
        except FileNotFoundError:
            return None

    def put(self, key: TranslationCacheKey, value: str) -> None:
        p = self.path(key)
        with self._lock:
            p.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=p.parent, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
                fh.write(value)
            os.replace(tmp, p)


# ---------------------------------------------------------------------------
# batching

def _call_with_retry(provider: Provider, batch: list[str], source: str, target: str,
                     attempts: int, backoff: float, sleep: Callable[[float], None]) -> list[str | None]:
    delay = backoff
    for attempt in range(1, attempts + 1):
        try:
            out = provider.translate(batch, source, target)
        except TransientError as exc:
            if attempt == attempts:
                raise RateLimitExhausted(f"gave up after {attempts} attempts: {exc}") from exc
            wait = delay * (1.0 + random.random())
            log.warning("transient translation failure (%s); retry %d/%d in %.1fs", exc, attempt, attempts - 1, wait)
            sleep(wait)
            delay *= 2
            continue
        if len(out) != len(batch):
            raise TranslationError(f"provider {provider.name} returned {len(out)} results for {len(batch)} inputs")
        return list(out)
    raise AssertionError("unreachable")


def translate_batch(texts: Sequence[str], source: str, target: str, provider: Provider,
                    cache: TranslationCache | None = None, batch_size: int = 100,
                    max_in_flight: int = 4, attempts: int = 5, backoff: float = 1.0,
                    sleep: Callable[[float], None] = time.sleep) -> list[str | None]:
    """Translate ``texts``; the result is index-aligned and ``None`` marks failed items.

    Duplicate texts and cached texts never reach the provider.  Raises
    :class:`AuthenticationError` immediately and :class:`RateLimitExhausted`
    once a batch fails ``attempts`` times; batches finished before that are
    already cached, so rerunning resumes the work.
    """
    if source == target:
        raise ValueError(f"source and target are both {source!r}")
    for i, t in enumerate(texts):
        if not t:
            raise ValueError(f"text {i} is empty")
    if batch_size < 1 or max_in_flight < 1:
        raise ValueError("batch_size and max_in_flight must be positive")

    results: dict[str, str | None] = {}
    pending: list[str] = []
    for t in texts:
        if t in results:
            continue
        hit = cache.get(TranslationCacheKey.of(provider.name, source, target, t)) if cache else None
        results[t] = hit
        if hit is None:
            pending.append(t)

    batches = [pending[i:i + batch_size] for i in range(0, len(pending), batch_size)]

    def run(batch: list[str]) -> None:
        out = _call_with_retry(provider, batch, source, target, attempts, backoff, sleep)
        for src, dst in zip(batch, out):
            results[src] = dst
            if dst is None:
                log.warning("translation failed for one %s->%s item", source, target)
            elif cache is not None:
                cache.put(TranslationCacheKey.of(provider.name, source, target, src), dst)

    if batches:
        with ThreadPoolExecutor(max_workers=min(max_in_flight, len(batches))) as pool:
            futures = [pool.submit(run, b) for b in batches]
            error: BaseException | None = None
            for fut in futures:
                try:
                    fut.result()
                except TranslationError as exc:
                    if error is None:
                        error = exc
                        for other in futures:
                            other.cancel()
            if error is not None:
                if isinstance(error, RateLimitExhausted):
                    done = sum(1 for t in pending if results.get(t) is not None)
                    error.completed, error.pending = done, len(pending) - done
                raise error
    return [results[t] for t in texts]


# ---------------------------------------------------------------------------
# corpus-level

def backtranslate_corpus(corpus: Corpus, pivot: str, provider: Provider,
                         cache: TranslationCache | None = None, **batch_options) -> Corpus:
    """Fill ``text_pivot`` and ``text_back``; records whose translation failed are dropped and counted."""
    if corpus.lang == pivot:
        raise ValueError(f"corpus language equals the pivot {pivot!r}")
    originals = [r.text_original for r in corpus]
    forward = translate_batch(originals, corpus.lang, pivot, provider, cache, **batch_options)
    ok = [i for i, t in enumerate(forward) if t]
    backward = translate_batch([forward[i] for i in ok], pivot, corpus.lang, provider, cache, **batch_options) if ok else []
    records = []
    for i, back in zip(ok, backward):
        if back:
            records.append(replace(corpus.records[i], text_pivot=forward[i], text_back=back))
    return corpus.with_records(
        records,
        dropped={"translation_failed": len(corpus) - len(records)},
        event={"step": "backtranslate", "provider": provider.name, "pivot": pivot},
    )


def iterated_backtranslate(corpus: Corpus, pivot: str, cycles: int, provider: Provider,
                           cache: TranslationCache | None = None,
                           checkpoint_dir: str | Path | None = None, **batch_options) -> list[Corpus]:
    """Backtranslate repeatedly; cycle ``i + 1`` translates cycle ``i``'s ``text_back``.

    Every returned corpus keeps the true original in ``text_original``.
    With ``checkpoint_dir`` each cycle is written to ``<lang>.cycle<N>.jsonl``.
    """
    if cycles < 1:
        raise ValueError(f"cycles must be >= 1, got {cycles}")
    out: list[Corpus] = []
    current = corpus
    for n in range(1, cycles + 1):
        originals = {r.id: r.text_original for r in current}
        feed = current if n == 1 else current.with_records(replace(r, text_original=r.text_back) for r in current)
        result = backtranslate_corpus(feed, pivot, provider, cache, **batch_options)
        result = result.with_records((replace(r, text_original=originals[r.id]) for r in result),
                                     event={"step": "cycle", "n": n})
        if checkpoint_dir is not None:
            write_corpus(result, Path(checkpoint_dir) / f"{corpus.lang}.cycle{n}.jsonl", variant="back")
        out.append(result)
        current = result
    return out


def estimate_cost(texts: Sequence[str], usd_per_million: float = USD_PER_MILLION_CHARS,
                  passes: int = 2) -> float:
    """Dollar estimate for translating ``texts`` ``passes`` times (a round trip is two passes).

    The backward pass is billed on pivot-language text, approximated here by
    the source length.
    """
    chars = sum(len(t) for t in texts)
    return chars * passes * usd_per_million / 1_000_000
