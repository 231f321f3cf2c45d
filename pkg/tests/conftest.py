"""Shared fixtures: a small hand-written inventory around the "plant" example
and a larger synthetic inventory + corpus driving the pipeline tests."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import pytest

from translex.corpora import Corpus, WsdInstance
from translex.ontology import Ontology, WordKey, load_ontology, surface_text


def write_jsonl(path: Path, records: list[dict]) -> Path:
    path.write_text("\n".join(json.dumps(r, ensure_ascii=False) for r in records) + "\n",
                    encoding="utf-8")
    return path


# --- the "plant" inventory ---------------------------------------------------

PLANT_RECORDS = [
    {"kind": "synset", "id": "plant-organism",
     "lemmas": {"en": ["plant", "flora"], "zh": ["植物"],
                "fr": ["plante", "végétal"], "es": ["planta"]},
     "definitions": {"en": "a living organism lacking the power of locomotion"},
     "examples": {"en": "The plant sprouted a new leaf"}},
    {"kind": "synset", "id": "plant-factory",
     "lemmas": {"en": ["plant", "factory"], "zh": ["工厂"],
                "fr": ["usine"], "es": ["fábrica"]},
     "definitions": {"en": "buildings for carrying on industrial labor"},
     "examples": {"en": "They built a large plant to make cars"}},
    {"kind": "entry", "lemma": "plant", "language": "en", "pos": "NOUN",
     "senses": ["plant-organism", "plant-factory"]},
    {"kind": "entry", "lemma": "factory", "language": "en", "pos": "NOUN",
     "senses": ["plant-factory"]},
]


@pytest.fixture
def plant_ontology(tmp_path) -> Ontology:
    return load_ontology(write_jsonl(tmp_path / "plant.jsonl", PLANT_RECORDS))


def plant_instance(gold={"plant-organism"}) -> WsdInstance:
    sentence = "The plant sprouted a new leaf"
    return WsdInstance(id="plant.0", language="en", sentence=sentence,
                       word_surface="plant", word_span=(4, 9), lemma="plant",
                       pos="NOUN", gold=frozenset(gold) if gold else None)


# --- synthetic pipeline inventory --------------------------------------------
#
# word00..word11: English nouns, 2 senses (even index) or 3 senses (odd index),
#   each sense with its own zh/fr surfaces; odd words' senses 1 and 2 share one
#   zh surface; es surfaces only when index % 3 != 0.
# word12: English-only lemmas (uncovered by every target).
# mot13:  French word with en translations but no zh (English-backoff case).
# word14: both senses share their single zh surface.
# filler00..filler59: single-sense words enlarging the target lemma pools.

N_WORDS = 12


def pipeline_records() -> list[dict]:
    records = []
    for i in range(N_WORDS):
        lemma = f"word{i:02d}"
        n_senses = 2 if i % 2 == 0 else 3
        sense_ids = [f"w{i:02d}.s{j}" for j in range(n_senses)]
        for j in range(n_senses):
            lemmas = {
                "en": [lemma, f"syn{i:02d}{j}"],
                "zh": [f"zh{i:02d}{j}a", f"zh{i:02d}{j}b"],
                "fr": [f"fr{i:02d}{j}a"],
            }
            if i % 3 != 0:
                lemmas["es"] = [f"es{i:02d}{j}a"]
            if i % 2 == 1 and j in (1, 2):
                lemmas["zh"].append(f"zh{i:02d}xs")
            records.append({
                "kind": "synset", "id": sense_ids[j], "lemmas": lemmas,
                "definitions": {"en": f"meaning {j} of {lemma}"},
                "examples": {"en": f"The {lemma} stays near marker {j} in town"},
            })
        records.append({"kind": "entry", "lemma": lemma, "language": "en",
                        "pos": "NOUN", "senses": sense_ids})

    records.append({"kind": "synset", "id": "w12.s0",
                    "lemmas": {"en": ["word12", "syn120"]},
                    "examples": {"en": "The word12 rests beside the old gate in town"}})
    records.append({"kind": "synset", "id": "w12.s1",
                    "lemmas": {"en": ["word12", "syn121"]}})
    records.append({"kind": "entry", "lemma": "word12", "language": "en",
                    "pos": "NOUN", "senses": ["w12.s0", "w12.s1"]})

    records.append({"kind": "synset", "id": "w13.s0",
                    "lemmas": {"fr": ["mot13", "truc13"], "en": ["thing13"]}})
    records.append({"kind": "synset", "id": "w13.s1",
                    "lemmas": {"fr": ["mot13"], "en": ["gadget13"]}})
    records.append({"kind": "entry", "lemma": "mot13", "language": "fr",
                    "pos": "NOUN", "senses": ["w13.s0", "w13.s1"]})

    records.append({"kind": "synset", "id": "w14.s0",
                    "lemmas": {"en": ["word14"], "zh": ["zh140a"]},
                    "examples": {"en": "The word14 stays near marker 0 in town"}})
    records.append({"kind": "synset", "id": "w14.s1",
                    "lemmas": {"en": ["word14", "syn141"], "zh": ["zh140a"]},
                    "examples": {"en": "The word14 stays near marker 1 in town"}})
    records.append({"kind": "entry", "lemma": "word14", "language": "en",
                    "pos": "NOUN", "senses": ["w14.s0", "w14.s1"]})

    for k in range(60):
        sid = f"fill.{k:02d}"
        records.append({"kind": "synset", "id": sid,
                        "lemmas": {"en": [f"filler{k:02d}"], "zh": [f"zf{k:02d}x"],
                                   "fr": [f"ff{k:02d}x"], "es": [f"ef{k:02d}x"]},
                        "examples": {"en": f"A filler{k:02d} sits on the shelf"}})
        records.append({"kind": "entry", "lemma": f"filler{k:02d}", "language": "en",
                        "pos": "NOUN", "senses": [sid]})
    return records


def _make_instance(i: int, lemma: str, gold_sense: str | None) -> WsdInstance:
    sentence = f"The {lemma} rests beside the old gate"
    start = sentence.index(lemma)
    return WsdInstance(id=f"inst{i:02d}", language="en", sentence=sentence,
                       word_surface=lemma, word_span=(start, start + len(lemma)),
                       lemma=lemma, pos="NOUN",
                       gold=frozenset([gold_sense]) if gold_sense else None)


def pipeline_corpus() -> Corpus:
    """13 gold-bearing instances: word00..word11 plus word14, all zh-covered."""
    instances = []
    for i in range(N_WORDS):
        gold_idx = (i // 2) % 2 if i % 2 == 0 else i % 3
        instances.append(_make_instance(i, f"word{i:02d}", f"w{i:02d}.s{gold_idx}"))
    instances.append(_make_instance(14, "word14", "w14.s0"))
    return Corpus(language="en", instances=instances, name="pipeline")


def oracle_good_surfaces(o: Ontology, corpus: Corpus, languages) -> frozenset[str]:
    """Prompt-ready surfaces of each instance's gold-sense translations."""
    good = set()
    for inst in corpus.instances:
        if not inst.gold:
            continue
        w = WordKey(inst.lemma, inst.language, inst.pos)
        for lang in languages:
            for surf, senses in o.translations(w, lang).items():
                if senses & inst.gold:
                    good.add(surface_text(surf))
    return frozenset(good)


@dataclass
class PipelineFixture:
    ontology: Ontology
    corpus: Corpus
    ontology_path: Path
    corpus_path: Path


@pytest.fixture
def pipeline(tmp_path) -> PipelineFixture:
    ontology_path = write_jsonl(tmp_path / "ontology.jsonl", pipeline_records())
    ontology = load_ontology(ontology_path)
    corpus = pipeline_corpus()
    from translex.corpora import write_jsonl_corpus
    corpus_path = tmp_path / "pipeline.jsonl"
    write_jsonl_corpus(corpus, corpus_path)
    return PipelineFixture(ontology=ontology, corpus=corpus,
                           ontology_path=ontology_path, corpus_path=corpus_path)


# --- XML corpus fixture -------------------------------------------------------

def write_xml_fixture(directory: Path, n_instances: int = 12,
                      language: str = "en") -> tuple[Path, Path]:
    """A unified-format XML corpus with one instance per sentence plus its
    gold key file. Instance i uses lemma ``word<i>`` and gold ``w<i>.s0``."""
    sentences = []
    key_lines = []
    for i in range(n_instances):
        lemma = f"word{i:02d}"
        inst_id = f"d000.s{i:03d}.t000"
        sentences.append(
            f'<sentence id="d000.s{i:03d}">'
            f'<wf lemma="the" pos="ADV">The</wf>'
            f'<instance id="{inst_id}" lemma="{lemma}" pos="NOUN">{lemma}</instance>'
            f'<wf lemma="rest" pos="VERB">rests</wf>'
            f'<wf lemma="here" pos="ADV">here</wf>'
            "</sentence>")
        key_lines.append(f"{inst_id} w{i:02d}.s0")
    xml = ('<?xml version="1.0" encoding="UTF-8" ?>\n'
           f'<corpus lang="{language}" source="fixture">\n<text id="d000">\n'
           + "\n".join(sentences) + "\n</text>\n</corpus>\n")
    data_path = directory / "fixture.data.xml"
    key_path = directory / "fixture.gold.key.txt"
    data_path.write_text(xml, encoding="utf-8")
    key_path.write_text("\n".join(key_lines) + "\n", encoding="utf-8")
    return data_path, key_path
