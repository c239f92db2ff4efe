"""Embedding distance of backtranslations, judged against peer baselines.

A round trip is convincing when the back sentence is closer to its original
than the original is to other sentences in the corpus.
Run: python3 demos/04_embedding_baselines.py
"""
# %%
from btvalid import NoiseProvider, backtranslate_corpus, cosine_distance, embedding_report
from btvalid.synthetic import make_dataset

print("cosine distances:", cosine_distance([1, 0], [1, 0]), cosine_distance([1, 0], [0, 1]),
      round(cosine_distance([1, 0], [0.6, 0.8]), 12))

# %%
data = make_dataset(1000, n_topics=10, seed=0)
for rate in (0.0, 0.1, 0.3, 0.6):
    provider = NoiseProvider(rate, {"xx": data.vocabulary, "en": data.vocabulary}, seed=0)
    r = embedding_report(backtranslate_corpus(data.corpus, "en", provider), data.embeddings, peers=500, seed=0)
    print(f"rate {rate}: back {r['mean_back_distance']:.3f}  min-peer {r['min_baseline']:.3f}  "
          f"mean-peer {r['mean_baseline']:.3f}  passes {r['passes_min']}/{r['passes_mean']}")
