"""Backtranslation validity toolkit.

Measures how much sentiment, topic structure and embedding geometry survive a
round trip original -> pivot -> original through a machine translation
provider, with bootstrap intervals, permutation nulls and peer baselines.
"""

from .corpus import Corpus, TextRecord, clean_text, load_corpora, load_corpus, read_corpus, sample_corpus, write_corpus
from .embed import EmbeddingTable, cosine_distance, embed_sentence, embedding_report, load_embeddings, peer_baselines
from .report import PipelineConfig, ValidationReport, emit_tables, run_pipeline
from .sentiment import ValenceLexicon, accuracy, bootstrap_accuracy, load_lexicon, score_text, sentiment_report
from .stats import IntervalSummary, RngStream, bootstrap, percentile, permute
from .topics import TopicModel, gsdmm_classify, gsdmm_fit, match_rate, permutation_null, topic_report
from .translate import (GoogleProvider, IdentityProvider, NoiseProvider, TranslationCache, backtranslate_corpus,
                        translate_batch)

__all__ = [
    "Corpus", "TextRecord", "clean_text", "load_corpora", "load_corpus", "read_corpus", "sample_corpus",
    "write_corpus", "EmbeddingTable", "cosine_distance", "embed_sentence", "embedding_report", "load_embeddings",
    "peer_baselines", "PipelineConfig", "ValidationReport", "emit_tables", "run_pipeline", "ValenceLexicon",
    "accuracy", "bootstrap_accuracy", "load_lexicon", "score_text", "sentiment_report", "IntervalSummary",
    "RngStream", "bootstrap", "percentile", "permute", "TopicModel", "gsdmm_classify", "gsdmm_fit", "match_rate",
    "permutation_null", "topic_report", "GoogleProvider", "IdentityProvider", "NoiseProvider", "TranslationCache",
    "backtranslate_corpus", "translate_batch",
]
