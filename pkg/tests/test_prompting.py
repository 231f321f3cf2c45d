from __future__ import annotations

import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from translex.prompting import (CANDIDATE_SLOT, WITH_CONTEXT, WITHOUT_CONTEXT,
                                PromptTemplate, TemplateError, load_templates,
                                render, render_parts)

from conftest import plant_instance

TEMPLATES = load_templates()

PAPER_LANGS = ["en", "es", "zh", "ca", "eu", "de", "et", "fr", "bg", "hr", "da",
               "nl", "gl", "hu", "it", "ja", "sl", "ko"]


def test_default_file_has_all_with_context_templates():
    for lang in PAPER_LANGS:
        assert (lang, WITH_CONTEXT) in TEMPLATES
    assert len([k for k in TEMPLATES if k[1] == WITH_CONTEXT]) == 18


def test_english_with_context_rendering_exact():
    rp = render(TEMPLATES[("en", WITH_CONTEXT)], plant_instance(), "zh")
    assert rp.prefix == ('In the sentence "The plant sprouted a new leaf", '
                         'the word "plant" is translated into Chinese as ')
    assert rp.suffix == ""


def test_english_without_context_rendering_exact():
    rp = render_parts(TEMPLATES[("en", WITHOUT_CONTEXT)], sentence="",
                      word="plant", target="fr")
    assert rp.prefix == 'The word "plant" is translated into French as '
    assert rp.suffix == ""


def test_japanese_infix_split():
    rp = render_parts(TEMPLATES[("ja", WITH_CONTEXT)], sentence="文",
                      word="語", target="zh")
    assert rp.suffix
    assert "となります" in rp.suffix
    assert rp.prefix.endswith("に訳すと ")


@pytest.mark.parametrize("lang", ["eu", "ja", "ko"])
def test_infix_templates_have_suffix(lang):
    rp = render_parts(TEMPLATES[(lang, WITH_CONTEXT)], sentence="s",
                      word="w", target="en")
    assert rp.suffix != ""


def test_continuation_concatenates_suffix():
    rp = render_parts(TEMPLATES[("ja", WITH_CONTEXT)], sentence="文",
                      word="語", target="zh")
    assert rp.continuation("候補") == "候補" + rp.suffix
    flat = render_parts(TEMPLATES[("en", WITH_CONTEXT)],
                        sentence="s", word="w", target="zh")
    assert flat.continuation("cand") == "cand"


def test_missing_display_name():
    template = TEMPLATES[("en", WITH_CONTEXT)]
    with pytest.raises(TemplateError, match="display name"):
        render_parts(template, sentence="s", word="w", target="ja")


def test_override_merge(tmp_path):
    override = tmp_path / "override.jsonl"
    record = {"language": "en", "mode": "with_context",
              "pattern": 'Translate "<source word>" from "<sentence>" into <target lang>: ',
              "language_names": {"zh": "Mandarin"}}
    override.write_text(json.dumps(record, ensure_ascii=False) + "\n", encoding="utf-8")
    merged = load_templates()
    merged.update(load_templates(override))
    assert merged[("en", WITH_CONTEXT)].language_names["zh"] == "Mandarin"
    unchanged = {k: v for k, v in merged.items() if k != ("en", WITH_CONTEXT)}
    assert unchanged == {k: v for k, v in TEMPLATES.items() if k != ("en", WITH_CONTEXT)}


def test_duplicate_key_rejected(tmp_path):
    record = {"language": "en", "mode": "without_context",
              "pattern": '"<source word>" in <target lang>: '}
    path = tmp_path / "dup.jsonl"
    path.write_text("\n".join([json.dumps(record)] * 2) + "\n", encoding="utf-8")
    with pytest.raises(TemplateError, match="duplicate"):
        load_templates(path)


def test_two_candidate_slots_rejected():
    with pytest.raises(TemplateError, match="more than one"):
        PromptTemplate(prompt_language="en", mode=WITHOUT_CONTEXT,
                       pattern=f'"<source word>" {CANDIDATE_SLOT} x {CANDIDATE_SLOT}')


def test_with_context_requires_sentence_placeholder():
    with pytest.raises(TemplateError, match="<sentence>"):
        PromptTemplate(prompt_language="en", mode=WITH_CONTEXT,
                       pattern='"<source word>" into <target lang>: ')


def test_without_context_forbids_sentence_placeholder():
    with pytest.raises(TemplateError, match="<sentence>"):
        PromptTemplate(prompt_language="en", mode=WITHOUT_CONTEXT,
                       pattern='"<sentence>" "<source word>": ')


def test_unknown_placeholder_rejected():
    with pytest.raises(TemplateError, match="unknown placeholder"):
        PromptTemplate(prompt_language="en", mode=WITHOUT_CONTEXT,
                       pattern='"<source word>" into <target langage> as ')


# --- reconstruction property ---------------------------------------------------

_TEXT = st.text(alphabet="abc xyz語植物", min_size=1, max_size=12)


@settings(max_examples=40, deadline=None)
@given(sentence=_TEXT, word=_TEXT, candidate=_TEXT)
def test_reconstruction_property(sentence, word, candidate):
    for (lang, mode), template in TEMPLATES.items():
        target = "zh"
        rp = render_parts(template, sentence=sentence, word=word, target=target)
        pattern = template.pattern
        if CANDIDATE_SLOT not in pattern:
            pattern = pattern + CANDIDATE_SLOT
        expected = pattern
        if mode == WITH_CONTEXT:
            expected = expected.replace("<sentence>", sentence)
        expected = (expected.replace("<source word>", word)
                    .replace("<target lang>", template.language_names[target])
                    .replace(CANDIDATE_SLOT, candidate))
        assert rp.prefix + candidate + rp.suffix == expected


def test_render_is_pure():
    instance = plant_instance()
    template = TEMPLATES[("ja", WITH_CONTEXT)]
    assert render(template, instance, "es") == render(template, instance, "es")
