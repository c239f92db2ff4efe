"""Corpus ingestion: dataset adapters, tweet cleaning and reproducible sampling.

The interchange format is JSON lines, one object per record with the fields
``id``, ``lang``, ``text`` and an optional ``label`` in {-1, 0, 1}.  Every
corpus file written by the toolkit has a ``<stem>.provenance.json`` sidecar
holding the drop counts and sampling seed.
"""

from __future__ import annotations

import csv
import json
import logging
import re
from collections import Counter
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Any, Iterable, Iterator, Mapping

import numpy as np
import yaml

from .stats import RngStream

log = logging.getLogger(__name__)

CLEAN_RULES_VERSION = "clean/1"
VARIANTS = ("original", "pivot", "back")

# Anything from "http" to the end of the token goes, so no "http" substring survives.
_URL = re.compile(r"http\S*|(?<!\S)www\.\S*", re.IGNORECASE)
# Retweet marker: leading "RT" token(s).  The colon after "RT @user:" leaves with the mention token.
_RETWEET = re.compile(r"^(?:\s*RT(?::|(?=\s)|$))+")
_MENTION = re.compile(r"(?<!\S)@\S*")
_DIGIT = re.compile(r"\d")
_LANG_CODE = re.compile(r"^[a-z]{2}$")


def _clean_pass(text: str) -> str:
    text = _URL.sub(" ", text)
    text = _RETWEET.sub(" ", text)
    text = _MENTION.sub(" ", text)
    text = _DIGIT.sub("", text)
    text = text.lower()
    return " ".join(text.split())


def clean_text(raw: str) -> str:
    """Strip URLs, retweet markers, @-mentions and digits; lowercase; collapse whitespace.

    The rules are applied repeatedly until the text stops changing, which
    makes the function idempotent even when one deletion exposes a new match
    (``"1@x"`` becomes ``"@x"`` once the digit is gone).

    >>> clean_text("@user Hello WORLD http://t.co/x 123")
    'hello world'
    >>> clean_text("RT @a: Gut! 42mal")
    'gut! mal'
    """
    text = raw
    for _ in range(32):
        cleaned = _clean_pass(text)
        if cleaned == text:
            return cleaned
        text = cleaned
    return text


@dataclass(frozen=True)
class TextRecord:
    id: str
    lang: str
    text_original: str
    text_pivot: str | None = None
    text_back: str | None = None
    label: int | None = None

    def text(self, variant: str) -> str | None:
        if variant == "original":
            return self.text_original
        if variant == "pivot":
            return self.text_pivot
        if variant == "back":
            return self.text_back
        raise ValueError(f"unknown text variant {variant!r}")


def _empty_provenance(source: str) -> dict[str, Any]:
    return {
        "source": source,
        "clean_rules": CLEAN_RULES_VERSION,
        "raw_count": 0,
        "kept": 0,
        "dropped": {},
        "history": [],
    }


@dataclass(frozen=True)
class Corpus:
    lang: str
    records: tuple[TextRecord, ...]
    provenance: dict[str, Any] = field(default_factory=lambda: _empty_provenance("memory"))

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(self.records))
        seen: set[str] = set()
        for rec in self.records:
            if rec.lang != self.lang:
                raise ValueError(f"record {rec.id!r} has lang {rec.lang!r}, corpus is {self.lang!r}")
            if rec.id in seen:
                raise ValueError(f"duplicate record id {rec.id!r}")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[TextRecord]:
        return iter(self.records)

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.records]

    def texts(self, variant: str = "original") -> list[str | None]:
        return [r.text(variant) for r in self.records]

    @property
    def dropped_total(self) -> int:
        return sum(self.provenance.get("dropped", {}).values())

    def with_records(self, records: Iterable[TextRecord], dropped: Mapping[str, int] | None = None,
                     event: dict[str, Any] | None = None) -> "Corpus":
        """New corpus over ``records``; extra drop counts and a history event are appended."""
        records = tuple(records)
        prov = json.loads(json.dumps(self.provenance))
        for reason, count in (dropped or {}).items():
            if count:
                prov["dropped"][reason] = prov["dropped"].get(reason, 0) + count
        prov["kept"] = len(records)
        if event is not None:
            prov["history"].append(event)
        return Corpus(self.lang, records, prov)


def from_texts(lang: str, texts: Iterable[str], labels: Iterable[int | None] | None = None,
               source: str = "memory") -> Corpus:
    """Build a cleaned corpus from raw strings, numbering ids from 0."""
    texts = list(texts)
    labels = list(labels) if labels is not None else [None] * len(texts)
    records, empty = [], 0
    for i, (raw, lab) in enumerate(zip(texts, labels)):
        cleaned = clean_text(raw)
        if not cleaned:
            empty += 1
            continue
        records.append(TextRecord(str(i), lang, cleaned, label=lab))
    prov = _empty_provenance(source)
    prov["raw_count"] = len(texts)
    prov["kept"] = len(records)
    if empty:
        prov["dropped"]["empty"] = empty
    return Corpus(lang, tuple(records), prov)


# ---------------------------------------------------------------------------
# adapters

@dataclass(frozen=True)
class Adapter:
    name: str
    format: str  # jsonl | csv | tsv
    columns: dict[str, str]
    labels: dict[str, int] = field(default_factory=dict)
    lang: str | None = None

    @classmethod
    def from_dict(cls, name: str, spec: Mapping[str, Any]) -> "Adapter":
        fmt = spec.get("format", "jsonl")
        if fmt not in ("jsonl", "csv", "tsv"):
            raise ValueError(f"adapter {name!r}: unsupported format {fmt!r}")
        columns = {"id": "id", "lang": "lang", "text": "text", "label": "label"}
        columns.update(spec.get("columns") or {})
        labels = {str(k).lower(): int(v) for k, v in (spec.get("labels") or {}).items()}
        if any(v not in (-1, 0, 1) for v in labels.values()):
            raise ValueError(f"adapter {name!r}: label map must target -1, 0 or 1")
        return cls(name, fmt, columns, labels, spec.get("lang"))


def load_adapters(path: str | Path | None = None) -> dict[str, Adapter]:
    """Built-in adapters, overlaid with the entries of an optional YAML file."""
    text = resources.files("btvalid").joinpath("adapters.yaml").read_text(encoding="utf-8")
    specs = dict(yaml.safe_load(text) or {})
    if path is not None:
        specs.update(yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {})
    return {name: Adapter.from_dict(name, spec) for name, spec in specs.items()}


class MalformedRow(ValueError):
    pass


def _rows(path: Path, adapter: Adapter) -> Iterator[tuple[int, Mapping[str, Any] | None, str | None]]:
    """Yield (line number, row or None, error) for every data row."""
    with path.open(encoding="utf-8", newline="") as fh:
        if adapter.format == "jsonl":
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                except json.JSONDecodeError as exc:
                    yield lineno, None, f"invalid JSON: {exc.msg}"
                    continue
                if not isinstance(row, dict):
                    yield lineno, None, "row is not a JSON object"
                    continue
                yield lineno, row, None
        else:
            reader = csv.DictReader(fh, delimiter="\t" if adapter.format == "tsv" else ",")
            for row in reader:
                # header is line 1
                yield reader.line_num, row, None


def _parse_label(value: Any, adapter: Adapter) -> int | None:
    if value is None or (isinstance(value, str) and not value.strip()):
        return None
    if isinstance(value, bool):
        raise MalformedRow(f"label {value!r} is not a sentiment")
    if isinstance(value, (int, float)):
        if value in (-1, 0, 1):
            return int(value)
        raise MalformedRow(f"label {value!r} outside {{-1, 0, 1}}")
    key = str(value).strip().lower()
    if key in adapter.labels:
        return adapter.labels[key]
    try:
        num = int(key)
    except ValueError:
        raise MalformedRow(f"unknown label {value!r}") from None
    if num not in (-1, 0, 1):
        raise MalformedRow(f"label {value!r} outside {{-1, 0, 1}}")
    return num


def _parse_row(row: Mapping[str, Any], adapter: Adapter, default_lang: str | None) -> tuple[str, str, str, int | None]:
    cols = adapter.columns
    rid = row.get(cols["id"])
    if rid is None or str(rid).strip() == "":
        raise MalformedRow(f"missing id column {cols['id']!r}")
    lang = row.get(cols["lang"]) or adapter.lang or default_lang
    if not lang:
        raise MalformedRow(f"no language: column {cols['lang']!r} absent and no default given")
    lang = str(lang).strip().lower()
    if not _LANG_CODE.match(lang):
        raise MalformedRow(f"unrecognized language code {lang!r}")
    text = row.get(cols["text"])
    if not isinstance(text, str):
        raise MalformedRow(f"missing text column {cols['text']!r}")
    label = _parse_label(row.get(cols["label"]), adapter)
    return str(rid).strip(), lang, text, label


def _scan(path: str | Path, adapter: Adapter, pivot: str, default_lang: str | None):
    path = Path(path)
    try:
        rows = list(_rows(path, adapter))
    except OSError as exc:
        raise OSError(f"cannot read corpus file {path}: {exc}") from exc
    for lineno, row, err in rows:
        if err is None:
            try:
                rid, lang, text, label = _parse_row(row, adapter, default_lang)
            except MalformedRow as exc:
                err = str(exc)
        if err is not None:
            log.warning("%s:%d: malformed row skipped: %s", path, lineno, err)
            yield None, "malformed"
            continue
        if lang == pivot:
            yield None, "pivot"
            continue
        yield (rid, lang, text, label), None


def _resolve_adapter(format: str, adapters: Mapping[str, Adapter] | None) -> Adapter:
    registry = adapters if adapters is not None else load_adapters()
    if format not in registry:
        raise KeyError(f"unknown dataset adapter {format!r}; known: {sorted(registry)}")
    return registry[format]


def load_corpora(path: str | Path, format: str = "jsonl", pivot: str = "en",
                 lang: str | None = None, adapters: Mapping[str, Adapter] | None = None) -> dict[str, Corpus]:
    """Load a possibly multilingual file, one cleaned corpus per language.

    Per-language provenance counts only rows of that language; file-level
    drops (pivot-language and malformed rows) are recorded under
    ``provenance["file_dropped"]``.
    """
    adapter = _resolve_adapter(format, adapters)
    file_dropped: Counter[str] = Counter()
    buckets: dict[str, list[tuple[str, str, int | None]]] = {}
    for parsed, reason in _scan(path, adapter, pivot, lang):
        if parsed is None:
            file_dropped[reason] += 1
            continue
        rid, rlang, text, label = parsed
        buckets.setdefault(rlang, []).append((rid, text, label))
    out: dict[str, Corpus] = {}
    for rlang in sorted(buckets):
        corpus = _build(rlang, buckets[rlang], f"{format}:{Path(path).name}", Counter())
        corpus.provenance["file_dropped"] = dict(file_dropped)
        out[rlang] = corpus
    return out


def _build(lang: str, rows: list[tuple[str, str, int | None]], source: str, dropped: Counter) -> Corpus:
    raw_count = len(rows) + sum(dropped.values())
    records: list[TextRecord] = []
    seen: set[str] = set()
    for rid, text, label in rows:
        if rid in seen:
            dropped["duplicate_id"] += 1
            continue
        cleaned = clean_text(text)
        if not cleaned:
            dropped["empty"] += 1
            continue
        seen.add(rid)
        records.append(TextRecord(rid, lang, cleaned, label=label))
    prov = _empty_provenance(source)
    prov["raw_count"] = raw_count
    prov["kept"] = len(records)
    prov["dropped"] = {k: v for k, v in sorted(dropped.items()) if v}
    return Corpus(lang, tuple(records), prov)


def load_corpus(path: str | Path, format: str = "jsonl", lang_filter: str | None = None,
                pivot: str = "en", lang: str | None = None,
                adapters: Mapping[str, Adapter] | None = None) -> Corpus:
    """Load one language from a dataset file.

    ``lang`` supplies the language for adapters whose files carry none (one
    file per language).  Without ``lang_filter`` the file must hold exactly
    one non-pivot language.
    """
    if lang_filter is not None and lang_filter == pivot:
        raise ValueError(f"cannot analyze the pivot language {pivot!r}")
    adapter = _resolve_adapter(format, adapters)
    dropped: Counter[str] = Counter()
    rows: list[tuple[str, str, int | None]] = []
    langs: set[str] = set()
    for parsed, reason in _scan(path, adapter, pivot, lang):
        if parsed is None:
            dropped[reason] += 1
            continue
        rid, rlang, text, label = parsed
        if lang_filter is not None and rlang != lang_filter:
            dropped["lang_filter"] += 1
            continue
        langs.add(rlang)
        rows.append((rid, text, label))
    if lang_filter is None:
        if len(langs) > 1:
            raise ValueError(f"{path} holds several languages {sorted(langs)}; pass lang_filter")
        if not langs:
            raise ValueError(f"{path} holds no non-pivot rows")
    target = lang_filter if lang_filter is not None else next(iter(langs))
    return _build(target, rows, f"{format}:{Path(path).name}", dropped)


def sample_corpus(corpus: Corpus, n: int, seed: int) -> Corpus:
    """Uniform sample of ``n`` records without replacement, original order kept."""
    if n < 1:
        raise ValueError(f"sample size must be positive, got {n}")
    if n > len(corpus):
        raise ValueError(f"cannot sample {n} records from a corpus of {len(corpus)}")
    rng = RngStream(seed, f"sample/{corpus.lang}").generator()
    keep = np.sort(rng.choice(len(corpus), size=n, replace=False))
    records = [corpus.records[i] for i in keep]
    return corpus.with_records(
        records,
        dropped={"sampled_out": len(corpus) - n},
        event={"step": "sample", "n": n, "seed": seed, "population": len(corpus)},
    )


# ---------------------------------------------------------------------------
# interchange files

def provenance_path(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.name.removesuffix(".jsonl") + ".provenance.json")


def write_corpus(corpus: Corpus, path: str | Path, variant: str = "original",
                 text_lang: str | None = None) -> Path:
    """Write one text variant as interchange JSONL plus its provenance sidecar.

    Records lacking the variant are skipped.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = []
    for rec in corpus:
        text = rec.text(variant)
        if text is None:
            continue
        row: dict[str, Any] = {"id": rec.id, "lang": rec.lang, "text": text}
        if rec.label is not None:
            row["label"] = rec.label
        if text_lang is not None and text_lang != rec.lang:
            row["text_lang"] = text_lang
        lines.append(json.dumps(row, ensure_ascii=False, sort_keys=True))
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    provenance_path(path).write_text(
        json.dumps(corpus.provenance, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return path


def read_corpus(path: str | Path) -> Corpus:
    """Read an interchange file written by :func:`write_corpus` (text is not re-cleaned)."""
    path = Path(path)
    records = []
    with path.open(encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            row = json.loads(line)
            records.append(TextRecord(str(row["id"]), row["lang"], row["text"], label=row.get("label")))
    side = provenance_path(path)
    prov = json.loads(side.read_text(encoding="utf-8")) if side.exists() else _empty_provenance(path.name)
    if not records:
        raise ValueError(f"{path} contains no records")
    return Corpus(records[0].lang, tuple(records), prov)


def assemble(original: Corpus, pivot: Corpus | None = None, back: Corpus | None = None) -> Corpus:
    """Join separately stored variants by id; ids missing from a variant keep ``None`` there."""
    piv = {r.id: r.text_original for r in pivot} if pivot is not None else {}
    bak = {r.id: r.text_original for r in back} if back is not None else {}
    records = [replace(r, text_pivot=piv.get(r.id, r.text_pivot), text_back=bak.get(r.id, r.text_back))
               for r in original]
    prov = back.provenance if back is not None else original.provenance
    return Corpus(original.lang, tuple(records), prov)
