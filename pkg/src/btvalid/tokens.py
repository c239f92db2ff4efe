"""Tokenizer shared by the sentiment, topic and embedding analytics.

Whitespace split, edge punctuation stripped, and every Han ideograph emitted
as its own token because Chinese text carries no word boundaries.
"""

from __future__ import annotations

import unicodedata

import regex

_HAN_OR_RUN = regex.compile(r"\p{Han}|[^\p{Han}]+")
_PICTOGRAPHIC = regex.compile(r"\p{Extended_Pictographic}")


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def strip_punctuation(token: str) -> str:
    start, end = 0, len(token)
    while start < end and _is_punct(token[start]):
        start += 1
    while end > start and _is_punct(token[end - 1]):
        end -= 1
    return token[start:end]


def tokenize(text: str) -> list[str]:
    out: list[str] = []
    for raw in text.split():
        for piece in _HAN_OR_RUN.findall(raw):
            piece = strip_punctuation(piece)
            if piece:
                out.append(piece)
    return out


def has_pictographic(token: str) -> bool:
    return _PICTOGRAPHIC.search(token) is not None
