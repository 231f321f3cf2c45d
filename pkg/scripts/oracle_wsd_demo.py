#!/usr/bin/env python3
"""End-to-end disambiguation demo on the generated demo data.

Runs the full pipeline twice with the deterministic oracle scorer (single
Chinese target, then the en+zh ensemble), prints the reports, and sweeps all
target subsets with the ablation command. No model server is needed.

Usage: python scripts/make_demo_data.py && python scripts/oracle_wsd_demo.py
"""

from __future__ import annotations

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
    base = ["--ontology", str(DEMO / "ontology.jsonl"),
            "--corpus", str(DEMO / "corpus.jsonl"), "--scorer", "mock-oracle"]
    run(["run-wsd", *base, "--targets", "zh", "--out", "demo_out/wsd_zh"])
    run(["run-wsd", *base, "--targets", "en,zh", "--out", "demo_out/wsd_en_zh"])
    run(["mcs-baseline", "--ontology", str(DEMO / "ontology.jsonl"),
         "--corpus", str(DEMO / "corpus.jsonl"), "--out", "demo_out/mcs"])
    run(["ablate", *base, "--targets", "zh,fr,es", "--out", "demo_out/ablate"])
    run(["report",
         "--input", "demo_out/wsd_zh/report.json", "--label", "zh",
         "--input", "demo_out/wsd_en_zh/report.json", "--label", "en+zh",
         "--out", "demo_out/merged"])
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
