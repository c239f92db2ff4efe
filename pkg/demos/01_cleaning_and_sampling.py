"""Cleaning raw social-media text and drawing a reproducible sample.

Run: python3 demos/01_cleaning_and_sampling.py
"""
# %%
import json
import tempfile
from pathlib import Path

from btvalid import clean_text, load_corpus, sample_corpus

# %% [markdown]
# Cleaning removes URLs, retweet markers, mentions and digits, then lowercases.
# It repeats until nothing changes, so cleaning twice equals cleaning once.

# %%
for raw in ["@user Hello WORLD http://t.co/x 123", "RT @a: Gut! 42mal", "7@bob 99 luftballons"]:
    print(f"{raw!r:40} -> {clean_text(raw)!r}")

# %% [markdown]
# Loading keeps a provenance record: every dropped row is counted by reason.

# %%
rows = [
    {"id": "1", "lang": "de", "text": "Das ist gut", "label": 1},
    {"id": "2", "lang": "de", "text": "@nur 123", "label": 0},
    {"id": "3", "lang": "de", "text": "Schlecht!", "label": -1},
    {"id": "3", "lang": "de", "text": "doppelt", "label": 1},
    {"id": "4", "lang": "en", "text": "pivot language row", "label": 1},
]
with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "tweets.jsonl"
    path.write_text("\n".join(json.dumps(r) for r in rows) + "\n{broken\n", encoding="utf-8")
    corpus = load_corpus(path, lang_filter="de", pivot="en")

print(len(corpus), "kept;", corpus.provenance["dropped"])

# %% [markdown]
# Sampling is keyed by seed: the same seed always picks the same records.

# %%
a = sample_corpus(corpus, 1, seed=7)
b = sample_corpus(corpus, 1, seed=7)
print([r.id for r in a], "==", [r.id for r in b])
