#!/usr/bin/env python3
"""Generate a small multilingual demo inventory and evaluation corpus.

Writes ``demo_data/ontology.jsonl`` and ``demo_data/corpus.jsonl`` relative to
the repository root (or to ``--out``). The inventory holds six ambiguous
English nouns with Chinese, French, and Spanish translations plus filler
vocabulary for negative sampling, so every CLI subcommand can run against it.
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

# lemma -> list of (sense id, gloss, context, {lang: [surfaces]})
WORDS = {
    "plant": [
        ("plant.n.organism", "a living thing that grows in soil",
         "The plant sprouted a new leaf",
         {"en": ["plant", "flora"], "zh": ["植物"], "fr": ["plante", "végétal"],
          "es": ["planta"]}),
        ("plant.n.factory", "an industrial building",
         "They built a large plant to make cars",
         {"en": ["plant", "factory"], "zh": ["工厂"], "fr": ["usine"],
          "es": ["fábrica"]}),
    ],
    "bank": [
        ("bank.n.institution", "a place that handles money",
         "She deposited money at the bank",
         {"en": ["bank"], "zh": ["银行"], "fr": ["banque"], "es": ["banco"]}),
        ("bank.n.river", "sloping land beside water",
         "We fished from the bank of the river",
         {"en": ["bank"], "zh": ["河岸"], "fr": ["rive"], "es": ["orilla"]}),
    ],
    "spring": [
        ("spring.n.season", "the season after winter",
         "Flowers bloom in the spring",
         {"en": ["spring"], "zh": ["春天"], "fr": ["printemps"], "es": ["primavera"]}),
        ("spring.n.coil", "an elastic metal coil",
         "The spring in the mattress broke",
         {"en": ["spring"], "zh": ["弹簧"], "fr": ["ressort"], "es": ["resorte"]}),
    ],
    "bat": [
        ("bat.n.animal", "a flying nocturnal mammal",
         "A bat flew out of the cave at dusk",
         {"en": ["bat"], "zh": ["蝙蝠"], "fr": ["chauve-souris"], "es": ["murciélago"]}),
        ("bat.n.club", "a club used to hit a ball",
         "He swung the bat and hit the ball",
         {"en": ["bat"], "zh": ["球棒"], "fr": ["batte"], "es": ["bate"]}),
    ],
    "mouse": [
        # fr/es keep one shared surface across senses, so those pairs fail the
        # disjoint-translations criterion while zh still qualifies
        ("mouse.n.animal", "a small rodent",
         "The mouse ate the cheese",
         {"en": ["mouse"], "zh": ["老鼠"], "fr": ["souris"], "es": ["ratón"]}),
        ("mouse.n.device", "a hand-held pointing device",
         "Click the left button of the mouse",
         {"en": ["mouse"], "zh": ["鼠标"], "fr": ["souris"], "es": ["ratón"]}),
    ],
    "letter": [
        ("letter.n.character", "a written symbol of the alphabet",
         "The word begins with the letter b",
         {"en": ["letter"], "zh": ["字母"], "fr": ["lettre"], "es": ["letra"]}),
        ("letter.n.mail", "a written message that is mailed",
         "He mailed a letter to his friend",
         {"en": ["letter"], "zh": ["信件"], "fr": ["lettre"], "es": ["carta"]}),
    ],
}

N_FILLERS = 55


def ontology_records() -> list[dict]:
    records = []
    for lemma, senses in WORDS.items():
        for sid, gloss, context, lemmas in senses:
            records.append({"kind": "synset", "id": sid, "lemmas": lemmas,
                            "definitions": {"en": gloss},
                            "examples": {"en": context}})
        records.append({"kind": "entry", "lemma": lemma, "language": "en",
                        "pos": "NOUN", "senses": [s[0] for s in senses]})
    for k in range(N_FILLERS):
        sid = f"filler.{k:02d}"
        records.append({"kind": "synset", "id": sid,
                        "lemmas": {"en": [f"gadget{k:02d}"], "zh": [f"器物{k:02d}"],
                                   "fr": [f"truc{k:02d}"], "es": [f"cosa{k:02d}"]}})
        records.append({"kind": "entry", "lemma": f"gadget{k:02d}", "language": "en",
                        "pos": "NOUN", "senses": [sid]})
    return records


def corpus_records() -> list[dict]:
    records = []
    for lemma, senses in WORDS.items():
        for n, (sid, _, context, _) in enumerate(senses):
            start = context.lower().index(lemma)
            records.append({
                "id": f"{lemma}.{n}", "language": "en", "sentence": context,
                "word_surface": context[start:start + len(lemma)],
                "word_span": [start, start + len(lemma)],
                "lemma": lemma, "pos": "NOUN", "gold": [sid],
            })
    return records


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="demo_data", help="output directory")
    args = parser.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, records in (("ontology.jsonl", ontology_records()),
                          ("corpus.jsonl", corpus_records())):
        path = out / name
        path.write_text("\n".join(json.dumps(r, ensure_ascii=False) for r in records)
                        + "\n", encoding="utf-8")
        print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
