from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from translex.ontology import (Ontology, OntologyError, Synset, WordKey,
                               load_ontology, surface_text, write_ontology)

from conftest import PLANT_RECORDS, plant_instance, write_jsonl

PLANT = WordKey("plant", "en", "NOUN")


def test_minimal_fixture_loads(tmp_path):
    records = [PLANT_RECORDS[0], PLANT_RECORDS[1], PLANT_RECORDS[2]]
    o = load_ontology(write_jsonl(tmp_path / "o.jsonl", records))
    assert len(o.entries) == 1
    assert len(o.synsets) == 2


def test_missing_synset_reference(tmp_path):
    records = [PLANT_RECORDS[0],
               {"kind": "entry", "lemma": "plant", "language": "en", "pos": "NOUN",
                "senses": ["plant-organism", "no-such-sense"]}]
    with pytest.raises(OntologyError, match="no-such-sense"):
        load_ontology(write_jsonl(tmp_path / "o.jsonl", records))


def test_plant_fixture_queries(plant_ontology):
    o = plant_ontology
    assert o.senses(PLANT) == ["plant-organism", "plant-factory"]
    assert o.translations(PLANT, "zh") == {"植物": {"plant-organism"},
                                           "工厂": {"plant-factory"}}


def test_senses_case_insensitive(plant_ontology):
    assert plant_ontology.senses(WordKey("Plant", "en", "NOUN")) == \
        plant_ontology.senses(PLANT)


def test_senses_oov(plant_ontology):
    assert plant_ontology.senses(WordKey("unicorn", "en", "NOUN")) == []


def test_mcs(plant_ontology):
    o = plant_ontology
    assert o.mcs(PLANT) == "plant-organism"
    assert o.mcs(WordKey("unicorn", "en", "NOUN")) is None
    assert o.mcs(WordKey("factory", "en", "NOUN")) == "plant-factory"


def test_translations_no_coverage(plant_ontology):
    assert plant_ontology.translations(PLANT, "de") == {}


def test_translations_shared_surface(tmp_path):
    records = [
        {"kind": "synset", "id": "s0", "lemmas": {"en": ["bank"], "zh": ["共享"]}},
        {"kind": "synset", "id": "s1", "lemmas": {"en": ["bank"], "zh": ["共享", "独有"]}},
        {"kind": "entry", "lemma": "bank", "language": "en", "pos": "NOUN",
         "senses": ["s0", "s1"]},
    ]
    o = load_ontology(write_jsonl(tmp_path / "o.jsonl", records))
    trans = o.translations(WordKey("bank", "en", "NOUN"), "zh")
    assert trans == {"共享": {"s0", "s1"}, "独有": {"s1"}}


def test_coverage_all_and_none(plant_ontology):
    instances = [plant_instance()] * 3
    assert plant_ontology.coverage(instances, "zh") == 1.0
    assert plant_ontology.coverage(instances, "de") == 0.0


def test_coverage_four_of_five(tmp_path):
    records = [
        {"kind": "synset", "id": "s0", "lemmas": {"en": ["aaa"], "zh": ["甲"]}},
        {"kind": "synset", "id": "s1", "lemmas": {"en": ["bbb"]}},
        {"kind": "entry", "lemma": "aaa", "language": "en", "pos": "NOUN", "senses": ["s0"]},
        {"kind": "entry", "lemma": "bbb", "language": "en", "pos": "NOUN", "senses": ["s1"]},
    ]
    o = load_ontology(write_jsonl(tmp_path / "o.jsonl", records))
    covered = plant_instance()
    covered.lemma = "aaa"
    uncovered = plant_instance()
    uncovered.lemma = "bbb"
    assert o.coverage([covered] * 4 + [uncovered], "zh") == pytest.approx(0.8)


def test_malformed_line_reports_number(tmp_path):
    path = tmp_path / "o.jsonl"
    path.write_text('{"kind":"synset","id":"s0","lemmas":{"en":["a"]}}\nnot json\n',
                    encoding="utf-8")
    with pytest.raises(OntologyError, match="line 2"):
        load_ontology(path)


def test_bom_rejected(tmp_path):
    path = tmp_path / "o.jsonl"
    path.write_bytes(b"\xef\xbb\xbf" + b'{"kind":"entry"}\n')
    with pytest.raises(OntologyError, match="BOM"):
        load_ontology(path)


@pytest.mark.parametrize("mutation, message", [
    ({"kind": "entry", "lemma": "plant", "language": "en", "pos": "NOUN", "senses": []},
     "empty sense list"),
    ({"kind": "entry", "lemma": "plant", "language": "en", "pos": "NOUN",
      "senses": ["plant-organism", "plant-organism"]}, "duplicate sense ids"),
    ({"kind": "entry", "lemma": "oak", "language": "en", "pos": "NOUN",
      "senses": ["plant-organism"]}, "does not list the lemma"),
    ({"kind": "entry", "lemma": "plant", "language": "EN", "pos": "NOUN",
      "senses": ["plant-organism"]}, "language code"),
    ({"kind": "entry", "lemma": "plant", "language": "en", "pos": "N",
      "senses": ["plant-organism"]}, "pos"),
    ({"kind": "widget", "id": "x"}, "unknown record kind"),
])
def test_invariant_violations(tmp_path, mutation, message):
    records = [PLANT_RECORDS[0], PLANT_RECORDS[1], mutation]
    with pytest.raises(OntologyError, match=message):
        load_ontology(write_jsonl(tmp_path / "o.jsonl", records))


def test_duplicate_synset_id(tmp_path):
    records = [PLANT_RECORDS[0], PLANT_RECORDS[0]]
    with pytest.raises(OntologyError, match="duplicate synset id"):
        load_ontology(write_jsonl(tmp_path / "o.jsonl", records))


def test_duplicate_entry(tmp_path):
    records = PLANT_RECORDS + [PLANT_RECORDS[2]]
    with pytest.raises(OntologyError, match="duplicate entry"):
        load_ontology(write_jsonl(tmp_path / "o.jsonl", records))


def test_empty_lemma_list_rejected(tmp_path):
    records = [{"kind": "synset", "id": "s0", "lemmas": {"zh": []}}]
    with pytest.raises(OntologyError, match="empty lemma list"):
        load_ontology(write_jsonl(tmp_path / "o.jsonl", records))


def test_duplicate_lemmas_rejected(tmp_path):
    records = [{"kind": "synset", "id": "s0", "lemmas": {"zh": ["甲", "甲"]}}]
    with pytest.raises(OntologyError, match="duplicate lemmas"):
        load_ontology(write_jsonl(tmp_path / "o.jsonl", records))


def test_unknown_fields_ignored(tmp_path):
    records = [dict(PLANT_RECORDS[0], extra="ignored"),
               dict(PLANT_RECORDS[1], other=[1, 2]),
               dict(PLANT_RECORDS[2], rank=3)]
    o = load_ontology(write_jsonl(tmp_path / "o.jsonl", records))
    assert o.senses(PLANT) == ["plant-organism", "plant-factory"]


def test_load_deterministic(tmp_path):
    path = write_jsonl(tmp_path / "o.jsonl", PLANT_RECORDS)
    assert load_ontology(path) == load_ontology(path)


def test_write_round_trip(tmp_path, plant_ontology):
    out = tmp_path / "copy.jsonl"
    write_ontology(plant_ontology, out)
    assert load_ontology(out) == plant_ontology


def test_surface_text():
    assert surface_text("kick_the_bucket") == "kick the bucket"
    assert surface_text("plant") == "plant"


# --- property tests -----------------------------------------------------------

_LANGS = ["zh", "fr", "es"]


@st.composite
def small_ontologies(draw):
    n_synsets = draw(st.integers(min_value=1, max_value=8))
    lemma_pool = [f"t{i}" for i in range(12)]
    synsets = {}
    for i in range(n_synsets):
        lemmas = {"en": ["word", f"alt{i}"]}
        for lang in _LANGS:
            chosen = draw(st.lists(st.sampled_from(lemma_pool), max_size=3, unique=True))
            if chosen:
                lemmas[lang] = chosen
        synsets[f"s{i}"] = Synset(id=f"s{i}", lemmas=lemmas)
    sense_ids = draw(st.permutations(sorted(synsets)))
    entries = {WordKey("word", "en", "NOUN"): list(sense_ids)}
    return Ontology.build(entries, synsets)


@settings(max_examples=60, deadline=None)
@given(small_ontologies())
def test_translations_brute_force_equivalence(o):
    w = WordKey("word", "en", "NOUN")
    sense_ids = o.senses(w)
    assert o.mcs(w) == sense_ids[0]
    for lang in _LANGS:
        trans = o.translations(w, lang)
        expected_keys = set()
        for sid in sense_ids:
            expected_keys.update(o.synsets[sid].lemmas.get(lang, ()))
        assert set(trans) == expected_keys
        for surf, senses in trans.items():
            direct = {sid for sid in sense_ids
                      if surf in o.synsets[sid].lemmas.get(lang, ())}
            assert senses == direct
