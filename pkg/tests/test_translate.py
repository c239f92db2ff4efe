import threading
import time

import numpy as np
import pytest
import requests

from btvalid.corpus import from_texts
from btvalid.translate import (AuthenticationError, GoogleProvider, IdentityProvider, NoiseProvider, Provider,
                               RateLimitExhausted, TransientError, TranslationCache, TranslationCacheKey,
                               TranslationError, backtranslate_corpus, estimate_cost, iterated_backtranslate,
                               make_provider, translate_batch)

VOCAB = [f"w{chr(97 + i // 26)}{chr(97 + i % 26)}" for i in range(26 * 26)]


class Counting(Provider):
    """Identity with an instrumented call log and optional scripted failures."""

    def __init__(self, fail_first: int = 0, error=TransientError, delay: float = 0.0):
        self.name = "counting"
        self.calls: list[tuple[str, ...]] = []
        self.fail_first = fail_first
        self.error = error
        self.delay = delay
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()

    def translate(self, texts, source, target):
        with self._lock:
            self.calls.append(tuple(texts))
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
            fail = len(self.calls) <= self.fail_first
        try:
            time.sleep(self.delay)
            if fail:
                raise self.error("scripted failure")
            return [f"{t}|{target}" for t in texts]
        finally:
            with self._lock:
                self.in_flight -= 1


def no_sleep(_):
    pass


def test_identity_provider_is_the_identity():
    texts = ["eins zwei", "drei", "eins zwei"]
    assert translate_batch(texts, "de", "en", IdentityProvider()) == texts


def test_noise_rate_zero_equals_identity():
    texts = ["wab wac wad", "wae", "waf wag"]
    assert translate_batch(texts, "de", "en", NoiseProvider(0.0, VOCAB)) == texts


def test_noise_rate_one_shares_no_tokens():
    corpus = from_texts("de", [" ".join(VOCAB[i:i + 8]) for i in range(0, 400, 8)])
    out = backtranslate_corpus(corpus, "en", NoiseProvider(1.0, VOCAB, seed=3))
    for rec in out:
        original, back, pivot = (set(rec.text_original.split()), rec.text_back.split(), rec.text_pivot.split())
        assert len(back) == len(original)
        assert not set(pivot) & original
        assert not set(back) & set(pivot)


def test_noise_is_deterministic_and_order_independent():
    p = NoiseProvider(0.5, VOCAB, seed=9)
    texts = [" ".join(VOCAB[i:i + 6]) for i in range(0, 60, 6)]
    forward = p.translate(texts, "de", "en")
    backward = p.translate(texts[::-1], "de", "en")[::-1]
    assert forward == backward == NoiseProvider(0.5, VOCAB, seed=9).translate(texts, "de", "en")
    assert forward != NoiseProvider(0.5, VOCAB, seed=10).translate(texts, "de", "en")


def test_noise_rates_are_coupled():
    text = " ".join(VOCAB[:40])
    low = NoiseProvider(0.2, VOCAB, seed=1).translate([text], "de", "en")[0].split()
    high = NoiseProvider(0.6, VOCAB, seed=1).translate([text], "de", "en")[0].split()
    original = text.split()
    changed_low = {i for i, (a, b) in enumerate(zip(original, low)) if a != b}
    changed_high = {i for i, (a, b) in enumerate(zip(original, high)) if a != b}
    assert changed_low < changed_high
    assert all(low[i] == high[i] for i in changed_low)


@pytest.mark.parametrize("rate, cycles", [(0.1, 1), (0.3, 2), (0.5, 3)])
def test_noise_survival_matches_expected_fraction(rate, cycles):
    rng = np.random.default_rng(0)
    texts = [" ".join(rng.choice(VOCAB, size=10, replace=False)) for _ in range(600)]
    corpus = from_texts("de", texts)
    final = iterated_backtranslate(corpus, "en", cycles, NoiseProvider(rate, VOCAB, seed=2))[-1]
    kept = [a == b for r in final for a, b in zip(r.text_original.split(), r.text_back.split())]
    expected = (1 - rate) ** (2 * cycles)
    se = np.sqrt(expected * (1 - expected) / len(kept))
    assert abs(np.mean(kept) - expected) < 4 * se + 0.005


def test_alignment_with_duplicates_and_batches():
    p = Counting()
    texts = [f"t{i % 7}" for i in range(50)]
    out = translate_batch(texts, "de", "en", p, batch_size=3, max_in_flight=2)
    assert out == [f"{t}|en" for t in texts]
    assert sorted(t for call in p.calls for t in call) == sorted(set(texts))


def test_cache_prevents_repeat_calls(tmp_path):
    cache = TranslationCache(tmp_path)
    p = Counting()
    texts = ["a", "b", "a", "c"]
    first = translate_batch(texts, "de", "en", p, cache)
    n_calls = len(p.calls)
    second = translate_batch(texts, "de", "en", p, cache)
    assert first == second and len(p.calls) == n_calls
    fresh = TranslationCache(tmp_path)
    assert translate_batch(["c", "b"], "de", "en", p, fresh) == ["c|en", "b|en"]
    assert len(p.calls) == n_calls
    key = TranslationCacheKey.of("counting", "de", "en", "a")
    assert fresh.path(key).relative_to(tmp_path).parts[:2] == ("counting", "de-en")
    assert fresh.get(key) == "a|en"


def test_in_flight_bound():
    p = Counting(delay=0.02)
    translate_batch([f"x{i}" for i in range(40)], "de", "en", p, batch_size=2, max_in_flight=3)
    assert 1 < p.max_in_flight <= 3


def test_retry_then_success():
    waits = []
    p = Counting(fail_first=2)
    assert translate_batch(["a"], "de", "en", p, attempts=5, backoff=1.0, sleep=waits.append) == ["a|en"]
    assert len(waits) == 2
    assert 1.0 <= waits[0] < 2.0 and 2.0 <= waits[1] < 4.0


def test_retry_exhaustion_and_auth_are_fatal():
    with pytest.raises(RateLimitExhausted) as info:
        translate_batch(["a", "b"], "de", "en", Counting(fail_first=99), attempts=3, sleep=no_sleep)
    assert info.value.pending == 2
    p = Counting(fail_first=1, error=AuthenticationError)
    with pytest.raises(AuthenticationError):
        translate_batch(["a"], "de", "en", p, sleep=no_sleep)
    assert len(p.calls) == 1


def test_exhaustion_keeps_finished_batches_cached(tmp_path):
    class FailsOnB(Counting):
        def translate(self, texts, source, target):
            if "b" in texts:
                raise TransientError("busy")
            return super().translate(texts, source, target)
    cache = TranslationCache(tmp_path)
    with pytest.raises(RateLimitExhausted):
        translate_batch(["a", "b"], "de", "en", FailsOnB(), cache, batch_size=1, max_in_flight=1,
                        attempts=2, sleep=no_sleep)
    assert cache.get(TranslationCacheKey.of("counting", "de", "en", "a")) == "a|en"


def test_per_item_failures_are_excluded_and_counted():
    class Partial(Provider):
        name = "partial"

        def translate(self, texts, source, target):
            return [None if "bad" in t else t for t in texts]
    corpus = from_texts("de", ["good one", "bad one", "fine"])
    out = backtranslate_corpus(corpus, "en", Partial())
    assert out.ids == ["0", "2"]
    assert out.provenance["dropped"]["translation_failed"] == 1


def test_backtranslate_identity_and_iterated():
    corpus = from_texts("de", ["eins", "zwei drei"])
    out = backtranslate_corpus(corpus, "en", IdentityProvider())
    assert all(r.text_original == r.text_pivot == r.text_back for r in out)
    cycles = iterated_backtranslate(corpus, "en", 5, IdentityProvider())
    assert len(cycles) == 5 and all(c.records == out.records for c in cycles)
    with pytest.raises(ValueError):
        backtranslate_corpus(corpus, "de", IdentityProvider())
    with pytest.raises(ValueError):
        iterated_backtranslate(corpus, "en", 0, IdentityProvider())


def test_iterated_cycle_one_equals_backtranslate(tmp_path):
    corpus = from_texts("de", [" ".join(VOCAB[i:i + 5]) for i in range(0, 100, 5)])
    p = NoiseProvider(0.4, VOCAB, seed=5)
    cycles = iterated_backtranslate(corpus, "en", 3, p, checkpoint_dir=tmp_path)
    assert cycles[0].records == backtranslate_corpus(corpus, "en", p).records
    assert all(c.texts() == corpus.texts() for c in cycles)
    assert sorted(x.name for x in tmp_path.glob("*.jsonl")) == [f"de.cycle{n}.jsonl" for n in (1, 2, 3)]


class FakeResponse:
    def __init__(self, status, payload=None):
        self.status_code = status
        self._payload = payload

    def json(self):
        if self._payload is None:
            raise ValueError("no json")
        return self._payload


class FakeSession:
    def __init__(self, responses):
        self.responses = list(responses)
        self.posts = []

    def post(self, url, data, timeout):
        self.posts.append((url, data))
        r = self.responses.pop(0)
        if isinstance(r, Exception):
            raise r
        return r


def test_google_provider_protocol():
    ok = FakeResponse(200, {"data": {"translations": [{"translatedText": "one"}, {"translatedText": "two"}]}})
    session = FakeSession([ok])
    g = GoogleProvider(api_key="k", session=session)
    assert g.translate(["eins", "zwei"], "de", "en") == ["one", "two"]
    url, data = session.posts[0]
    assert url.endswith("/language/translate/v2")
    assert data == [("q", "eins"), ("q", "zwei"), ("source", "de"), ("target", "en"), ("format", "text"),
                    ("key", "k")]


@pytest.mark.parametrize("response, outcome", [
    (FakeResponse(401), AuthenticationError),
    (FakeResponse(403), AuthenticationError),
    (FakeResponse(429), TransientError),
    (FakeResponse(503), TransientError),
    (requests.Timeout("slow"), TransientError),
    (FakeResponse(400), [None, None]),
    (FakeResponse(200, {"unexpected": 1}), [None, None]),
    (FakeResponse(200, {"data": {"translations": [{"translatedText": "x"}]}}), [None, None]),
])
def test_google_provider_errors(response, outcome):
    g = GoogleProvider(api_key="k", session=FakeSession([response]))
    if isinstance(outcome, list):
        assert g.translate(["a", "b"], "de", "en") == outcome
    else:
        with pytest.raises(outcome):
            g.translate(["a", "b"], "de", "en")


def test_google_provider_key_from_environment(monkeypatch):
    monkeypatch.delenv("TRANSLATE_API_KEY", raising=False)
    with pytest.raises(AuthenticationError):
        GoogleProvider()
    monkeypatch.setenv("TRANSLATE_API_KEY", "env-key")
    assert GoogleProvider(session=FakeSession([])).api_key == "env-key"


def test_google_retry_through_translate_batch():
    ok = FakeResponse(200, {"data": {"translations": [{"translatedText": "hello"}]}})
    session = FakeSession([FakeResponse(500), FakeResponse(429), ok])
    assert translate_batch(["hallo"], "de", "en", GoogleProvider("k", session=session), sleep=no_sleep) == ["hello"]
    assert len(session.posts) == 3


def test_make_provider_and_validation():
    assert isinstance(make_provider("identity"), IdentityProvider)
    with pytest.raises(ValueError):
        make_provider("noise")
    with pytest.raises(KeyError):
        make_provider("babel")
    with pytest.raises(ValueError):
        NoiseProvider(1.5, VOCAB)
    with pytest.raises(ValueError):
        translate_batch(["a"], "de", "de", IdentityProvider())
    with pytest.raises(ValueError):
        translate_batch([""], "de", "en", IdentityProvider())
    with pytest.raises(TranslationError):
        class Short(Provider):
            name = "short"

            def translate(self, texts, source, target):
                return []
        translate_batch(["a"], "de", "en", Short())


def test_cost_estimate():
    # 1,000 characters, two passes, $20 per million characters
    assert estimate_cost(["x" * 500, "y" * 500]) == pytest.approx(0.04)
