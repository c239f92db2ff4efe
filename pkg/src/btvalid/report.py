"""End-to-end orchestration, the merged validation report and its CSV/JSON tables.

Output directory layout::

    corpora/<lang>.original.jsonl   cleaned, sampled originals (+ .provenance.json sidecars)
    corpora/<lang>.pivot.jsonl      pivot-language translations
    corpora/<lang>.back.jsonl       backtranslations
    corpora/<lang>.cycle<N>.jsonl   later backtranslation cycles (N >= 2)
    stages/<name>.json              completion markers: content hash of the stage inputs + result
    cache/                          translation cache (unless provider.cache_dir is set)
    reports/                        report.json, sentiment.csv, topics.csv, embedding.csv, fig*.svg

A stage is skipped when its marker holds the hash of its current inputs, so
rerunning an unchanged config recomputes nothing and rewrites identical bytes.
"""

from __future__ import annotations

import copy
import csv
import hashlib
import io
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import metadata, resources
from pathlib import Path
from typing import Any, Callable, Mapping

import jsonschema
import yaml

from . import stats
from .corpus import (Corpus, assemble, load_adapters, load_corpora, load_corpus, read_corpus, sample_corpus,
                     write_corpus)
from .embed import embedding_report, load_embeddings
from .sentiment import load_lexicon, sentiment_report
from .topics import DEFAULT_KS, load_stopwords, topic_report
from .tokens import tokenize
from .translate import TranslationCache, iterated_backtranslate, make_provider

log = logging.getLogger(__name__)

SECTIONS = ("sentiment", "topics", "embedding")
VARIANTS = ("original", "pivot", "back")


class ConfigError(ValueError):
    pass


def toolkit_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "0+unknown"


# ---------------------------------------------------------------------------
# configuration

_DEFAULTS: dict[str, Any] = {
    "pivot": "en",
    "workers": 1,
    "cycles": 1,
    "provider": {"name": "identity", "noise_rate": 0.0, "batch_size": 100, "max_in_flight": 4, "attempts": 5},
    "analytics": {"sentiment": True, "topics": True, "embedding": True},
    "resources": {},
    "sentiment": {"replicates": 1000, "level": 0.99, "exclude_neutral": "both"},
    "topics": {"ks": list(DEFAULT_KS), "alpha": 0.1, "beta": 0.1, "iterations": 5, "permutations": 1000},
    "embedding": {"peers": 5000},
}


def config_schema() -> dict:
    return json.loads(resources.files("btvalid").joinpath("config.schema.json").read_text(encoding="utf-8"))


@dataclass
class PipelineConfig:
    sources: list[dict]
    seed: int
    output_dir: Path
    pivot: str = "en"
    adapters: Path | None = None
    workers: int = 1
    cycles: int = 1
    provider: dict = field(default_factory=dict)
    analytics: dict = field(default_factory=dict)
    resources: dict = field(default_factory=dict)
    sentiment: dict = field(default_factory=dict)
    topics: dict = field(default_factory=dict)
    embedding: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], base_dir: str | Path = ".") -> "PipelineConfig":
        """Validate against the published schema, fill defaults and resolve relative paths."""
        try:
            jsonschema.validate(dict(data), config_schema())
        except jsonschema.ValidationError as exc:
            where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
            raise ConfigError(f"config {where}: {exc.message}") from None
        merged = copy.deepcopy(_DEFAULTS)
        for key, value in data.items():
            if isinstance(value, dict) and isinstance(merged.get(key), dict):
                merged[key].update(value)
            else:
                merged[key] = copy.deepcopy(value)
        base = Path(base_dir)

        def resolve(p: str | None) -> Path | None:
            return None if p is None else (base / p).resolve()

        sources = [dict(s, path=str(resolve(s["path"])), adapter=s.get("adapter", "jsonl")) for s in merged["sources"]]
        res = {k: str(resolve(v)) for k, v in merged["resources"].items()}
        provider = dict(merged["provider"])
        if "cache_dir" in provider:
            provider["cache_dir"] = str(resolve(provider["cache_dir"]))
        cfg = cls(
            sources=sources, seed=int(merged["seed"]), output_dir=resolve(merged["output_dir"]),
            pivot=merged["pivot"], adapters=resolve(merged.get("adapters")), workers=merged["workers"],
            cycles=merged["cycles"], provider=provider, analytics=merged["analytics"], resources=res,
            sentiment=merged["sentiment"], topics=merged["topics"], embedding=merged["embedding"],
        )
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path: str | Path, overrides: Mapping[str, Any] | None = None) -> "PipelineConfig":
        path = Path(path)
        try:
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
        except (OSError, yaml.YAMLError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} is not a mapping")
        for dotted, value in (overrides or {}).items():
            node = data
            *parents, leaf = dotted.split(".")
            for p in parents:
                node = node.setdefault(p, {})
            node[leaf] = value
        return cls.from_dict(data, base_dir=path.parent)

    def validate(self) -> None:
        for src in self.sources:
            if not Path(src["path"]).is_file():
                raise ConfigError(f"source file {src['path']} does not exist")
            if src.get("lang") == self.pivot:
                raise ConfigError(f"source {src['path']} analyzes the pivot language {self.pivot!r}")
        if self.adapters is not None and not self.adapters.is_file():
            raise ConfigError(f"adapter file {self.adapters} does not exist")
        needs = {"sentiment": "lexicons", "topics": "stopwords", "embedding": "embeddings"}
        for section, resource in needs.items():
            path = self.resources.get(resource)
            if path is not None and not Path(path).is_dir():
                raise ConfigError(f"resources.{resource}: {path} is not a directory")
            if self.analytics.get(section) and section != "topics" and path is None:
                raise ConfigError(f"analytics.{section} is enabled but resources.{resource} is not set")
        registry = load_adapters(self.adapters)
        for src in self.sources:
            if src["adapter"] not in registry:
                raise ConfigError(f"unknown adapter {src['adapter']!r}")

    def to_dict(self) -> dict:
        return {
            "sources": self.sources, "seed": self.seed, "output_dir": str(self.output_dir), "pivot": self.pivot,
            "adapters": None if self.adapters is None else str(self.adapters), "workers": self.workers,
            "cycles": self.cycles, "provider": {k: v for k, v in self.provider.items() if k != "api_key"},
            "analytics": self.analytics, "resources": self.resources, "sentiment": self.sentiment,
            "topics": self.topics, "embedding": self.embedding,
        }


# ---------------------------------------------------------------------------
# report

@dataclass
class ValidationReport:
    metadata: dict
    languages: dict[str, dict]
    pooled: dict

    def to_dict(self) -> dict:
        return {"metadata": self.metadata, "languages": self.languages, "pooled": self.pooled}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "ValidationReport":
        return cls(dict(data["metadata"]), dict(data["languages"]), dict(data["pooled"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), ensure_ascii=False, sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ValidationReport":
        return cls.from_dict(json.loads(text))

    @property
    def complete(self) -> bool:
        requested = [s for s in SECTIONS if self.metadata.get("analytics", {}).get(s, True)]
        return all(lang.get("status", {}).get(s) == "ok" for lang in self.languages.values() for s in requested)

    @property
    def exit_code(self) -> int:
        return 0 if self.complete else 3


# ---------------------------------------------------------------------------
# checkpoints

def corpus_path(out_dir: str | Path, lang: str, variant: str) -> Path:
    return Path(out_dir) / "corpora" / f"{lang}.{variant}.jsonl"


def checkpoint_languages(out_dir: str | Path) -> list[str]:
    return sorted(p.name.split(".")[0] for p in (Path(out_dir) / "corpora").glob("*.original.jsonl"))


def load_checkpoint(out_dir: str | Path, lang: str, cycle: int = 1) -> Corpus:
    """Original joined with the pivot and backtranslated variants of ``cycle``."""
    original = read_corpus(corpus_path(out_dir, lang, "original"))
    if cycle == 1:
        pivot_p, back_p = corpus_path(out_dir, lang, "pivot"), corpus_path(out_dir, lang, "back")
        pivot = read_corpus(pivot_p) if pivot_p.exists() else None
    else:
        back_p, pivot = corpus_path(out_dir, lang, f"cycle{cycle}"), None
    back = read_corpus(back_p) if back_p.exists() else None
    return assemble(original, pivot, back)


def _digest(*parts: Any) -> str:
    h = hashlib.sha256()
    for part in parts:
        if isinstance(part, Path):
            h.update(part.read_bytes() if part.is_file() else b"<missing>")
        else:
            h.update(json.dumps(part, sort_keys=True, default=str).encode("utf-8"))
        h.update(b"\0")
    return h.hexdigest()


class _Stages:
    def __init__(self, out_dir: Path):
        self.dir = out_dir / "stages"

    def run(self, name: str, key: str, compute: Callable[[], Any], outputs: list[Path] = (),
            force: bool = False) -> Any:
        marker = self.dir / f"{name}.json"
        if not force and marker.exists() and all(p.exists() for p in outputs):
            stored = json.loads(marker.read_text(encoding="utf-8"))
            if stored.get("key") == key:
                log.info("stage %s up to date", name)
                return stored.get("result")
        result = compute()
        self.dir.mkdir(parents=True, exist_ok=True)
        marker.write_text(json.dumps({"key": key, "result": result}, sort_keys=True, ensure_ascii=False),
                          encoding="utf-8")
        return result


# ---------------------------------------------------------------------------
# pipeline

def _provider(config: PipelineConfig, corpora: Mapping[str, Corpus]):
    p = config.provider
    vocabulary = None
    if p["name"] == "noise":
        vocabulary = {lang: sorted({t for text in c.texts() for t in text.split()}) for lang, c in corpora.items()}
        vocabulary[config.pivot] = sorted({t for v in list(vocabulary.values()) for t in v})
    return make_provider(p["name"], api_key=p.get("api_key"), noise_rate=p.get("noise_rate", 0.0),
                         vocabulary=vocabulary, seed=config.seed)


def _sentiment_dict(result: Mapping[str, Any]) -> tuple[dict, dict]:
    per_lang = {lang: {v: (s.to_dict() if s else None) for v, s in variants.items()}
                for lang, variants in result["languages"].items()}
    pooled = {v: (s.to_dict() if s else None) for v, s in result["pooled"].items()}
    return per_lang, pooled


def _ingest(config: PipelineConfig) -> dict[str, Corpus]:
    adapters = load_adapters(config.adapters)
    corpora: dict[str, Corpus] = {}
    for src in config.sources:
        if src.get("lang"):
            found = {src["lang"]: load_corpus(src["path"], src["adapter"], lang_filter=src["lang"],
                                              pivot=config.pivot, lang=src["lang"], adapters=adapters)}
        else:
            found = load_corpora(src["path"], src["adapter"], pivot=config.pivot, adapters=adapters)
        for lang, corpus in found.items():
            if lang in corpora:
                raise ConfigError(f"language {lang!r} comes from more than one source")
            if src.get("sample"):
                if src["sample"] > len(corpus):
                    raise ConfigError(f"{lang}: cannot sample {src['sample']} from {len(corpus)} records")
                corpus = sample_corpus(corpus, src["sample"], config.seed)
            corpora[lang] = corpus
    return corpora


def run_pipeline(config: PipelineConfig) -> ValidationReport:
    """Ingest, backtranslate, analyze and write tables and plots under ``config.output_dir``.

    A failing analytic marks its section ``failed`` and the run carries on;
    translation failures (authentication, exhausted retries) propagate.
    """
    from .plots import emit_plots

    out = Path(config.output_dir)
    stages = _Stages(out)
    pivot = config.pivot

    # ingest
    source_key = _digest("ingest", stats.PRNG_ID, config.pivot, config.seed,
                         [(s, Path(s["path"])) for s in config.sources],
                         config.adapters and Path(config.adapters))
    originals: dict[str, Corpus] = {}

    def ingest() -> list[str]:
        corpora = _ingest(config)
        for lang, corpus in corpora.items():
            write_corpus(corpus, corpus_path(out, lang, "original"))
        return sorted(corpora)

    langs = stages.run("ingest", source_key, ingest)
    if not all(corpus_path(out, lang, "original").exists() for lang in langs):
        langs = stages.run("ingest", source_key, ingest, force=True)
    for lang in langs:
        originals[lang] = read_corpus(corpus_path(out, lang, "original"))

    # translate
    cache = TranslationCache(config.provider.get("cache_dir") or out / "cache")
    provider = None
    batch = {k: config.provider[k] for k in ("batch_size", "max_in_flight", "attempts")}
    for lang in langs:
        outputs = [corpus_path(out, lang, v) for v in ("pivot", "back")]
        outputs += [corpus_path(out, lang, f"cycle{n}") for n in range(2, config.cycles + 1)]
        provider_key = {k: v for k, v in config.provider.items() if k not in ("api_key", "cache_dir")}
        key = _digest("translate", corpus_path(out, lang, "original"), provider_key, pivot, config.cycles, config.seed)

        def translate(lang=lang) -> dict:
            nonlocal provider
            if provider is None:
                provider = _provider(config, originals)
            cycles = iterated_backtranslate(originals[lang], pivot, config.cycles, provider, cache, **batch)
            first = cycles[0]
            write_corpus(first, corpus_path(out, lang, "pivot"), variant="pivot", text_lang=pivot)
            write_corpus(first, corpus_path(out, lang, "back"), variant="back")
            for n, corpus in enumerate(cycles[1:], start=2):
                write_corpus(corpus, corpus_path(out, lang, f"cycle{n}"), variant="back")
            return {"provider": provider.name, "kept": [len(c) for c in cycles]}

        stages.run(f"{lang}.translate", key, translate, outputs)

    corpora = {lang: load_checkpoint(out, lang) for lang in langs}
    for lang, corpus in list(corpora.items()):
        ids = {r.id for r in corpus if r.text_back is not None}
        corpora[lang] = corpus.with_records(r for r in corpus if r.id in ids)

    languages: dict[str, dict] = {}
    for lang in langs:
        c = corpora[lang]
        prov = read_corpus(corpus_path(out, lang, "back")).provenance if corpus_path(out, lang, "back").exists() else c.provenance
        languages[lang] = {
            "corpus": {"raw_count": prov.get("raw_count"), "kept": prov.get("kept"),
                       "dropped": prov.get("dropped", {}), "analyzed": len(c)},
            "sentiment": None, "topics": None, "embedding": None,
            "status": {s: ("pending" if config.analytics.get(s) else "disabled") for s in SECTIONS},
            "errors": {},
        }
    pooled: dict[str, Any] = {"sentiment": None}
    corpus_files = {lang: [corpus_path(out, lang, v) for v in VARIANTS] for lang in langs}

    # sentiment (all languages at once, for pooling)
    if config.analytics.get("sentiment"):
        lex_dir = Path(config.resources["lexicons"])
        s_cfg = config.sentiment
        key = _digest("sentiment", s_cfg, config.seed, pivot, stats.PRNG_ID,
                      {lang: corpus_files[lang] for lang in langs},
                      sorted((p.name, p) for p in lex_dir.glob("*.tsv")))

        def sentiment() -> dict:
            lexicons = {}
            for lang in [*langs, pivot]:
                p = lex_dir / f"{lang}.tsv"
                if p.exists():
                    lexicons[lang] = load_lexicon(p, lang)
            result = sentiment_report(list(corpora.values()), lexicons, pivot, s_cfg["replicates"], config.seed,
                                      s_cfg["exclude_neutral"], s_cfg["level"])
            per_lang, pooled_s = _sentiment_dict(result)
            return {"languages": per_lang, "pooled": pooled_s, "skipped": result["skipped"]}

        try:
            res = stages.run("sentiment", key, sentiment)
            pooled["sentiment"] = res["pooled"]
            for lang in langs:
                if lang in res["languages"]:
                    languages[lang]["sentiment"] = res["languages"][lang]
                    languages[lang]["status"]["sentiment"] = "ok"
                else:
                    languages[lang]["status"]["sentiment"] = "skipped"
                    languages[lang]["errors"]["sentiment"] = res["skipped"].get(lang, "skipped")
        except Exception as exc:  # report the section as failed, keep the run going
            log.exception("sentiment analytic failed")
            for lang in langs:
                languages[lang]["status"]["sentiment"] = "failed"
                languages[lang]["errors"]["sentiment"] = f"{type(exc).__name__}: {exc}"

    # topics and embedding, per language
    def per_language(lang: str) -> None:
        entry = languages[lang]
        corpus = corpora[lang]
        if config.analytics.get("topics"):
            t_cfg = config.topics
            stop_dir = config.resources.get("stopwords")
            stop_path = Path(stop_dir) / f"{lang}.txt" if stop_dir else None
            key = _digest("topics", t_cfg, config.seed, stats.PRNG_ID, corpus_files[lang], stop_path)

            def topics() -> dict:
                stop = load_stopwords(stop_path) if stop_path is not None and stop_path.exists() else None
                if stop is None:
                    log.warning("topics %s: no stopword list, proceeding without stopword removal", lang)
                return topic_report(corpus, stop, t_cfg["ks"], t_cfg["alpha"], t_cfg["beta"],
                                    t_cfg["iterations"], t_cfg["permutations"], config.seed)
            try:
                entry["topics"] = stages.run(f"{lang}.topics", key, topics)
                entry["status"]["topics"] = "ok"
            except Exception as exc:
                log.exception("topics %s failed", lang)
                entry["status"]["topics"] = "failed"
                entry["errors"]["topics"] = f"{type(exc).__name__}: {exc}"
        if config.analytics.get("embedding"):
            emb_path = Path(config.resources["embeddings"]) / f"{lang}.txt"
            if not emb_path.exists():
                entry["status"]["embedding"] = "skipped"
                entry["errors"]["embedding"] = f"missing embedding table {emb_path.name}"
            else:
                e_cfg = config.embedding
                key = _digest("embedding", e_cfg, config.seed, stats.PRNG_ID, corpus_files[lang], emb_path)

                def embedding() -> dict:
                    result = embedding_report(corpus, load_embeddings(emb_path, lang), e_cfg["peers"], config.seed)
                    if config.cycles > 1:
                        result["cycles"] = _cycle_distances(out, lang, config.cycles, load_embeddings(emb_path, lang))
                    return result
                try:
                    entry["embedding"] = stages.run(f"{lang}.embedding", key, embedding)
                    entry["status"]["embedding"] = "ok"
                except Exception as exc:
                    log.exception("embedding %s failed", lang)
                    entry["status"]["embedding"] = "failed"
                    entry["errors"]["embedding"] = f"{type(exc).__name__}: {exc}"

    if config.workers > 1 and len(langs) > 1:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            list(pool.map(per_language, langs))
    else:
        for lang in langs:
            per_language(lang)

    report = ValidationReport(
        metadata={
            "toolkit_version": toolkit_version(),
            "prng": stats.PRNG_ID,
            "percentile_method": stats.PERCENTILE_METHOD,
            "seed": config.seed,
            "pivot": pivot,
            "provider": {k: v for k, v in config.provider.items() if k not in ("api_key", "cache_dir")},
            "cycles": config.cycles,
            "analytics": dict(config.analytics),
            "sentiment": dict(config.sentiment),
            "topics": dict(config.topics),
            "embedding": dict(config.embedding),
            "pooling": "concatenate evaluable items across languages, then bootstrap",
            "languages": langs,
        },
        languages=languages,
        pooled=pooled,
    )
    reports = out / "reports"
    emit_tables(report, reports)
    emit_plots(report, reports)
    return report


def _cycle_distances(out: Path, lang: str, cycles: int, table) -> list[dict]:
    from .embed import backtranslation_distances

    rows = []
    for n in range(1, cycles + 1):
        corpus = load_checkpoint(out, lang, n)
        corpus = corpus.with_records(r for r in corpus if r.text_back is not None)
        d = backtranslation_distances(corpus, table, tokenize)
        rows.append({"cycle": n, "mean_back_distance": d.mean, "excluded": d.excluded})
    return rows


# ---------------------------------------------------------------------------
# tables

SENTIMENT_COLUMNS = ["lang"] + [f"{v}_{m}" for v in VARIANTS for m in ("n", "median", "hci99_low", "hci99_high")]
TOPIC_COLUMNS = ["lang", "K", "match_rate", "null_mean", "null_se", "matched", "aligned"]
EMBEDDING_COLUMNS = ["lang", "mean_back_distance", "min_baseline", "mean_baseline", "passes_min", "passes_mean",
                     "peers", "excluded_back_distance", "excluded_baseline"]
POOLED = "pooled"
MEAN = "mean"


def fmt(value: Any, digits: int = 4) -> str:
    """Table cell text; ``None`` becomes an empty cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    return f"{value:.{digits}f}"


def sentiment_rows(report: ValidationReport) -> list[dict[str, str]]:
    def row(lang: str, variants: Mapping[str, Any] | None) -> dict[str, str]:
        r = {"lang": lang}
        for v in VARIANTS:
            s = (variants or {}).get(v)
            r[f"{v}_n"] = fmt(s and s["n_evaluable"])
            for m in ("median", "hci99_low", "hci99_high"):
                r[f"{v}_{m}"] = fmt(s and s[m])
        return r
    rows = [row(lang, report.languages[lang].get("sentiment")) for lang in sorted(report.languages)]
    rows.append(row(POOLED, report.pooled.get("sentiment")))
    return rows


def topic_rows(report: ValidationReport) -> list[dict[str, str]]:
    rows = []
    by_k: dict[int, list[dict]] = {}
    for lang in sorted(report.languages):
        topics = report.languages[lang].get("topics")
        if not topics:
            rows.append({c: (lang if c == "lang" else "") for c in TOPIC_COLUMNS})
            continue
        for t in topics["rows"]:
            rows.append({"lang": lang, "K": fmt(t["K"]), "match_rate": fmt(t["match_rate"]),
                         "null_mean": fmt(t["null_mean"]), "null_se": fmt(t["null_se"], 6),
                         "matched": fmt(t["matched"]), "aligned": fmt(t["aligned"])})
            by_k.setdefault(t["K"], []).append(t)
    for K in sorted(by_k):
        ts = by_k[K]
        rows.append({"lang": MEAN, "K": fmt(K),
                     "match_rate": fmt(sum(t["match_rate"] for t in ts) / len(ts)),
                     "null_mean": fmt(sum(t["null_mean"] for t in ts) / len(ts)),
                     "null_se": "", "matched": fmt(sum(t["matched"] for t in ts)),
                     "aligned": fmt(sum(t["aligned"] for t in ts))})
    return rows


def embedding_rows(report: ValidationReport) -> list[dict[str, str]]:
    rows = []
    for lang in sorted(report.languages):
        e = report.languages[lang].get("embedding") or {}
        ex = e.get("excluded_counts") or {}
        rows.append({
            "lang": lang,
            "mean_back_distance": fmt(e.get("mean_back_distance"), 3),
            "min_baseline": fmt(e.get("min_baseline"), 3),
            "mean_baseline": fmt(e.get("mean_baseline"), 3),
            "passes_min": fmt(e.get("passes_min")),
            "passes_mean": fmt(e.get("passes_mean")),
            "peers": fmt(e.get("peers")),
            "excluded_back_distance": fmt(ex.get("back_distance")),
            "excluded_baseline": fmt(ex.get("baseline")),
        })
    return rows


def _csv_text(columns: list[str], rows: list[dict[str, str]]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def emit_tables(report: ValidationReport, out_dir: str | Path) -> dict[str, Path]:
    """Write ``sentiment.csv``, ``topics.csv``, ``embedding.csv`` and ``report.json``.

    Columns are fixed whatever the report holds; missing values are empty cells.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    paths = {
        "sentiment": out / "sentiment.csv",
        "topics": out / "topics.csv",
        "embedding": out / "embedding.csv",
        "report": out / "report.json",
    }
    paths["sentiment"].write_text(_csv_text(SENTIMENT_COLUMNS, sentiment_rows(report)), encoding="utf-8")
    paths["topics"].write_text(_csv_text(TOPIC_COLUMNS, topic_rows(report)), encoding="utf-8")
    paths["embedding"].write_text(_csv_text(EMBEDDING_COLUMNS, embedding_rows(report)), encoding="utf-8")
    paths["report"].write_text(report.to_json(), encoding="utf-8")
    return paths
