#!/usr/bin/env python3
"""Build and score a word-level translation benchmark from the demo data.

Builds the en->zh dataset, scores it with the oracle scorer in both prompt
modes, and prints the resulting accuracy and error-reduction metrics.

Usage: python scripts/make_demo_data.py && python scripts/cwlt_demo.py
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

from translex.cli import main as translex

DEMO = Path("demo_data")


def run(args: list[str]) -> None:
    print(f"\n$ translex {' '.join(args)}")
    code = translex(args)
    if code != 0:
        sys.exit(code)


def main() -> int:
    if not (DEMO / "ontology.jsonl").exists():
        print("demo data missing; run scripts/make_demo_data.py first",
              file=sys.stderr)
        return 1
    run(["build-cwlt", "--ontology", str(DEMO / "ontology.jsonl"),
         "--source", "en", "--target", "zh", "--n-random-negatives", "50",
         "--seed", "0", "--out", "demo_out/cwlt"])
    run(["run-cwlt", "--dataset", "demo_out/cwlt/dataset.jsonl",
         "--scorer", "mock-oracle", "--out", "demo_out/cwlt_run"])
    metrics = json.loads(Path("demo_out/cwlt_run/metrics.json").read_text("utf-8"))
    print(json.dumps({k: metrics[k] for k in
                      ("top1_accuracy", "all_translations_accuracy",
                       "error_reduction")}, indent=2, ensure_ascii=False))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
