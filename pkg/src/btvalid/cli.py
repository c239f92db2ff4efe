"""``btvalid`` command line.

Exit codes: 0 success, 1 configuration or input error, 2 translation provider
failure, 3 some requested analytic did not complete.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import yaml

from .corpus import load_adapters, load_corpora, load_corpus, read_corpus, sample_corpus, write_corpus
from .embed import embedding_report, load_embeddings
from .plots import emit_plots
from .report import (SECTIONS, ConfigError, PipelineConfig, ValidationReport, checkpoint_languages, corpus_path,
                     emit_tables, load_checkpoint, run_pipeline, toolkit_version)
from .sentiment import load_lexicons, sentiment_report
from .stats import PERCENTILE_METHOD, PRNG_ID
from .topics import DEFAULT_KS, load_stopword_dir, topic_report
from .translate import (AuthenticationError, RateLimitExhausted, TranslationCache, TranslationError,
                        estimate_cost, iterated_backtranslate, make_provider)

log = logging.getLogger("btvalid")

EXIT_OK, EXIT_CONFIG, EXIT_PROVIDER, EXIT_PARTIAL = 0, 1, 2, 3


def _checkpoint_root(path: str) -> Path:
    p = Path(path)
    return p.parent if p.name == "corpora" else p


def _write_json(data: dict, path: str) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(data, ensure_ascii=False, sort_keys=True, indent=2) + "\n", encoding="utf-8")


def _meta(seed: int, **extra) -> dict:
    return {"toolkit_version": toolkit_version(), "prng": PRNG_ID, "percentile_method": PERCENTILE_METHOD,
            "seed": seed, **extra}


def cmd_ingest(args) -> int:
    adapters = load_adapters(args.adapters)
    if args.lang:
        corpora = {args.lang: load_corpus(args.input, args.adapter, lang_filter=args.lang, pivot=args.pivot,
                                          lang=args.lang, adapters=adapters)}
    else:
        corpora = load_corpora(args.input, args.adapter, pivot=args.pivot, adapters=adapters)
    for lang, corpus in corpora.items():
        if args.sample:
            corpus = sample_corpus(corpus, args.sample, args.seed)
        path = write_corpus(corpus, corpus_path(args.out_dir, lang, "original"))
        prov = corpus.provenance
        print(f"{lang}: kept {len(corpus)} of {prov['raw_count']} rows, dropped {prov['dropped']} -> {path}")
    return EXIT_OK


def cmd_translate(args) -> int:
    corpus = read_corpus(args.input)
    if args.dry_run:
        cost = estimate_cost(corpus.texts())
        print(f"{corpus.lang}: {len(corpus)} texts, estimated ${cost:.2f} per round trip at $20 per million characters")
        return EXIT_OK
    vocabulary = None
    if args.provider == "noise":
        vocabulary = sorted({t for text in corpus.texts() for t in text.split()})
    provider = make_provider(args.provider, noise_rate=args.noise_rate, vocabulary=vocabulary, seed=args.seed)
    out = Path(args.out_dir)
    cache = TranslationCache(args.cache_dir or out / "cache")
    original = corpus_path(out, corpus.lang, "original")
    if Path(args.input).resolve() != original.resolve():
        write_corpus(corpus, original)
    cycles = iterated_backtranslate(corpus, args.pivot, args.cycles, provider, cache,
                                    batch_size=args.batch_size, max_in_flight=args.max_in_flight)
    write_corpus(cycles[0], corpus_path(out, corpus.lang, "pivot"), variant="pivot", text_lang=args.pivot)
    write_corpus(cycles[0], corpus_path(out, corpus.lang, "back"), variant="back")
    for n, c in enumerate(cycles[1:], start=2):
        write_corpus(c, corpus_path(out, corpus.lang, f"cycle{n}"), variant="back")
    print(f"{corpus.lang}: {len(cycles[-1])} of {len(corpus)} records backtranslated ({args.cycles} cycle(s))")
    return EXIT_OK


def _corpora(root: Path) -> list:
    langs = checkpoint_languages(root)
    if not langs:
        raise ConfigError(f"no corpora/<lang>.original.jsonl under {root}")
    return [load_checkpoint(root, lang) for lang in langs]


def cmd_sentiment(args) -> int:
    corpora = _corpora(_checkpoint_root(args.corpus))
    result = sentiment_report(corpora, load_lexicons(args.lexicons), args.pivot, args.replicates, args.seed,
                              args.exclude_neutral, args.level)
    data = {
        "metadata": _meta(args.seed, replicates=args.replicates, level=args.level,
                          exclude_neutral=result["exclude_neutral"], pivot=args.pivot),
        "languages": {lang: {v: (s.to_dict() if s else None) for v, s in variants.items()}
                      for lang, variants in result["languages"].items()},
        "pooled": {v: (s.to_dict() if s else None) for v, s in result["pooled"].items()},
        "skipped": result["skipped"],
    }
    _write_json(data, args.out)
    return EXIT_OK if not result["skipped"] else EXIT_PARTIAL


def cmd_topics(args) -> int:
    corpora = _corpora(_checkpoint_root(args.corpus))
    stop = load_stopword_dir(args.stopwords) if args.stopwords else {}
    ks = [int(k) for k in args.ks.split(",")]
    data = {"metadata": _meta(args.seed, ks=ks, alpha=args.alpha, beta=args.beta, iterations=args.iters,
                              permutations=args.perms), "languages": {}, "errors": {}}
    for corpus in corpora:
        try:
            data["languages"][corpus.lang] = topic_report(corpus, stop.get(corpus.lang), ks, args.alpha, args.beta,
                                                          args.iters, args.perms, args.seed)
        except ValueError as exc:
            data["errors"][corpus.lang] = str(exc)
    _write_json(data, args.out)
    return EXIT_OK if not data["errors"] else EXIT_PARTIAL


def cmd_embed(args) -> int:
    corpora = _corpora(_checkpoint_root(args.corpus))
    data = {"metadata": _meta(args.seed, peers=args.peers), "languages": {}, "errors": {}}
    for corpus in corpora:
        path = next((Path(args.embeddings) / f"{corpus.lang}{ext}" for ext in (".txt", ".vec")
                     if (Path(args.embeddings) / f"{corpus.lang}{ext}").exists()), None)
        if path is None:
            data["errors"][corpus.lang] = "missing embedding table"
            continue
        try:
            data["languages"][corpus.lang] = embedding_report(corpus, load_embeddings(path, corpus.lang),
                                                              args.peers, args.seed)
        except ValueError as exc:
            data["errors"][corpus.lang] = str(exc)
    _write_json(data, args.out)
    return EXIT_OK if not data["errors"] else EXIT_PARTIAL


def merge_sections(sentiment: dict | None = None, topics: dict | None = None,
                   embedding: dict | None = None) -> ValidationReport:
    """Assemble a report from the JSON outputs of the per-stage commands."""
    sections = {"sentiment": sentiment, "topics": topics, "embedding": embedding}
    langs = sorted({lang for s in sections.values() if s for lang in s.get("languages", {})}
                   | {lang for s in sections.values() if s for lang in s.get("errors", {}) or s.get("skipped", {})})
    languages = {}
    for lang in langs:
        entry = {"sentiment": None, "topics": None, "embedding": None, "status": {}, "errors": {}}
        for name, section in sections.items():
            if section is None:
                entry["status"][name] = "disabled"
            elif lang in section.get("languages", {}):
                entry[name] = section["languages"][lang]
                entry["status"][name] = "ok"
            else:
                entry["status"][name] = "failed"
                entry["errors"][name] = (section.get("errors") or section.get("skipped") or {}).get(lang, "missing")
        languages[lang] = entry
    metadata = {name: s["metadata"] for name, s in sections.items() if s}
    metadata["analytics"] = {name: s is not None for name, s in sections.items()}
    return ValidationReport(metadata, languages, {"sentiment": (sentiment or {}).get("pooled")})


def cmd_render(args) -> int:
    if args.report:
        report = ValidationReport.from_json(Path(args.report).read_text(encoding="utf-8"))
    else:
        load = lambda p: json.loads(Path(p).read_text(encoding="utf-8")) if p else None  # noqa: E731
        report = merge_sections(load(args.sentiment), load(args.topics), load(args.embed))
    emit_tables(report, args.out_dir)
    paths = emit_plots(report, args.out_dir)
    for name, path in paths.items():
        print(f"{name}: {path if path else 'skipped (no data)'}")
    return EXIT_OK


def _parse_set(items: list[str]) -> dict:
    out = {}
    for item in items:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key] = yaml.safe_load(value)
    return out


def cmd_run(args) -> int:
    overrides = _parse_set(args.set)
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.output_dir is not None:
        overrides["output_dir"] = str(Path(args.output_dir).resolve())
    config = PipelineConfig.load(args.config, overrides)
    report = run_pipeline(config)
    for lang, entry in sorted(report.languages.items()):
        status = ", ".join(f"{s}={entry['status'][s]}" for s in SECTIONS)
        print(f"{lang}: {status}")
    print(f"report: {Path(config.output_dir) / 'reports' / 'report.json'}")
    return report.exit_code


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="btvalid", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config key, e.g. topics.ks=[2,10]")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("ingest", help="load, clean and sample a dataset into the checkpoint layout")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--adapter", default="jsonl")
    p.add_argument("--adapters", help="YAML file with extra adapters")
    p.add_argument("--lang")
    p.add_argument("--pivot", default="en")
    p.add_argument("--sample", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("translate", help="backtranslate one corpus through the pivot language")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--pivot", default="en")
    p.add_argument("--provider", choices=("google", "identity", "noise"), default="identity")
    p.add_argument("--noise-rate", type=float, default=0.0)
    p.add_argument("--cycles", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cache-dir")
    p.add_argument("--batch-size", type=int, default=100)
    p.add_argument("--max-in-flight", type=int, default=4)
    p.add_argument("--dry-run", action="store_true", help="print a cost estimate and exit")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("sentiment", help="bootstrapped lexicon sentiment accuracy")
    p.add_argument("--corpus", required=True, help="checkpoint directory")
    p.add_argument("--lexicons", required=True, help="directory of <lang>.tsv lexicons")
    p.add_argument("--pivot", default="en")
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--level", type=float, default=0.99)
    p.add_argument("--exclude-neutral", choices=("none", "gold", "predicted", "both"), default="both")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sentiment)

    p = sub.add_parser("topics", help="GSDMM cluster agreement over a sweep of K")
    p.add_argument("--corpus", required=True)
    p.add_argument("--stopwords", help="directory of <lang>.txt stopword lists")
    p.add_argument("--ks", default=",".join(str(k) for k in DEFAULT_KS))
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--beta", type=float, default=0.1)
    p.add_argument("--iters", type=int, default=5)
    p.add_argument("--perms", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_topics)

    p = sub.add_parser("embed", help="embedding distances against peer baselines")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True, help="directory of <lang>.txt embedding tables")
    p.add_argument("--peers", type=int, default=5000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("render", help="tables and SVG figures from report JSON")
    p.add_argument("--report")
    p.add_argument("--sentiment")
    p.add_argument("--topics")
    p.add_argument("--embed")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_render)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (AuthenticationError, RateLimitExhausted, TranslationError) as exc:
        log.error("translation provider failure: %s", exc)
        return EXIT_PROVIDER
    except (ConfigError, KeyError, ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
