"""End to end: config file in, checkpoints, tables and plots out.

Writes into a temporary directory and prints what was produced.  A second run
finds every stage up to date and recomputes nothing.
Run: python3 demos/05_full_pipeline.py
"""
# %%
import json
import logging
import tempfile
from pathlib import Path

import yaml

from btvalid import PipelineConfig, run_pipeline
from btvalid.synthetic import make_dataset, write_resources

logging.basicConfig(level=logging.INFO, format="%(message)s")

# %%
tmp = Path(tempfile.mkdtemp(prefix="btvalid-demo-"))
data = make_dataset(500, n_topics=10, seed=0)
res = write_resources(data, tmp / "res")
with (tmp / "xx.jsonl").open("w", encoding="utf-8") as fh:
    for r in data.corpus:
        fh.write(json.dumps({"id": r.id, "lang": r.lang, "text": r.text_original, "label": r.label}) + "\n")

config = {
    "seed": 11,
    "output_dir": "out",
    "sources": [{"path": "xx.jsonl"}],
    "provider": {"name": "noise", "noise_rate": 0.2},
    "resources": res,
    "sentiment": {"replicates": 500},
    "topics": {"ks": [2, 5, 10], "permutations": 200},
    "embedding": {"peers": 200},
}
(tmp / "pipeline.yaml").write_text(yaml.safe_dump(config), encoding="utf-8")

# %%
report = run_pipeline(PipelineConfig.load(tmp / "pipeline.yaml"))
print("complete:", report.complete)
for p in sorted((tmp / "out").rglob("*")):
    if p.is_file():
        print(" ", p.relative_to(tmp))

# %%
run_pipeline(PipelineConfig.load(tmp / "pipeline.yaml"))
print((tmp / "out" / "reports" / "sentiment.csv").read_text())
