"""The whole pipeline through the CLI, end to end.

Equivalent to:

    sprachbund all --config <cfg>

on the bundled demo corpus with precomputed embeddings. Every stage writes a
versioned JSON artifact into the workspace; rerunning with the same config
reproduces identical bytes (check the digests).
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from sprachbund import cli, data

out = Path(__file__).parent / "out"
workspace = out / "workspace"
out.mkdir(exist_ok=True)

config = {
    "corpus_root": str(data.path("demo/corpus")),
    "embeddings": str(data.path("demo/embeddings.jsonl")),
    "k": 2,
    "seed": 7,
    "tsne": {"perplexity": 2.0, "iterations": 500},
    "out": str(workspace),
}
config_path = out / "demo_config.json"
config_path.write_text(json.dumps(config, indent=2), encoding="utf-8")

rc = cli.main(["all", "--config", str(config_path)])
print(f"\nexit status: {rc}")

print("\nworkspace artifacts:")
for path in sorted(workspace.iterdir()):
    print(f"  {path.name:24s} {path.stat().st_size:6d} bytes")

manifest = json.loads((workspace / "manifest_k2.json").read_text())
print(f"\nmanifest k={manifest['k']}, config digest "
      f"{manifest['config_digest']}:")
for cluster in manifest["clusters"]:
    print(f"  pivot {cluster['pivot']}: members {' '.join(cluster['members'])}")
    print(f"    shards: {', '.join(cluster['shards'])}")
