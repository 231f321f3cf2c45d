"""Prompt templates for contextual word-level translation.

Each template is a fill-in pattern for one prompt language and mode
(with or without a context sentence). Rendering substitutes the
``<sentence>``, ``<source word>`` and ``<target lang>`` placeholders and
splits the result into a prefix and suffix around the candidate slot: the
prefix is what the model is conditioned on, the suffix (non-empty only for
infix patterns marked with ``[target word]``) is appended to every candidate
before scoring.

Whitespace adjacent to the candidate slot is stored explicitly in each
pattern and never trimmed, since token boundaries affect scoring.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .ontology import check_language_code

WITH_CONTEXT = "with_context"
WITHOUT_CONTEXT = "without_context"
MODES = (WITH_CONTEXT, WITHOUT_CONTEXT)

CANDIDATE_SLOT = "[target word]"
_PLACEHOLDERS = ("<sentence>", "<source word>", "<target lang>")
_PLACEHOLDER_RE = re.compile(r"<[a-z][a-z ]*>")


class TemplateError(ValueError):
    """Malformed template file or unrenderable template."""


@dataclass
class PromptTemplate:
    prompt_language: str
    mode: str
    pattern: str
    language_names: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        check_language_code(self.prompt_language)
        if self.mode not in MODES:
            raise TemplateError(f"invalid mode {self.mode!r}")
        if self.mode == WITH_CONTEXT and "<sentence>" not in self.pattern:
            raise TemplateError(
                f"{self.prompt_language}/{self.mode}: pattern lacks <sentence>"
            )
        if self.mode == WITHOUT_CONTEXT and "<sentence>" in self.pattern:
            raise TemplateError(
                f"{self.prompt_language}/{self.mode}: pattern must not contain <sentence>"
            )
        if self.pattern.count(CANDIDATE_SLOT) > 1:
            raise TemplateError(
                f"{self.prompt_language}/{self.mode}: more than one {CANDIDATE_SLOT} marker"
            )
        if self.pattern.startswith(CANDIDATE_SLOT):
            raise TemplateError(
                f"{self.prompt_language}/{self.mode}: pattern starts at the candidate slot"
            )
        for found in _PLACEHOLDER_RE.findall(self.pattern):
            if found not in _PLACEHOLDERS:
                raise TemplateError(
                    f"{self.prompt_language}/{self.mode}: unknown placeholder {found!r}"
                )
        for code in self.language_names:
            check_language_code(code)


@dataclass(frozen=True)
class RenderedPrompt:
    """A prompt split at the candidate slot. ``prefix`` is always non-empty."""

    prefix: str
    suffix: str = ""

    def continuation(self, candidate_text: str) -> str:
        """The full string to score for a candidate (candidate plus suffix)."""
        return candidate_text + self.suffix


def render_parts(template: PromptTemplate, *, sentence: str, word: str,
                 target: str) -> RenderedPrompt:
    """Substitute placeholders and split the pattern at the candidate slot."""
    name = template.language_names.get(target)
    if name is None:
        raise TemplateError(
            f"{template.prompt_language}/{template.mode}: no display name for "
            f"target language {target!r}"
        )
    text = template.pattern
    if template.mode == WITH_CONTEXT:
        text = text.replace("<sentence>", sentence)
    text = text.replace("<source word>", word).replace("<target lang>", name)
    if CANDIDATE_SLOT in text:
        prefix, suffix = text.split(CANDIDATE_SLOT, 1)
    else:
        prefix, suffix = text, ""
    if not prefix:
        raise TemplateError(
            f"{template.prompt_language}/{template.mode}: rendered prefix is empty"
        )
    return RenderedPrompt(prefix=prefix, suffix=suffix)


def render(template: PromptTemplate, instance, target: str) -> RenderedPrompt:
    """Render a prompt for one corpus instance."""
    return render_parts(template, sentence=instance.sentence,
                        word=instance.word_surface, target=target)


TemplateMap = dict[tuple[str, str], PromptTemplate]


def _parse_template_lines(text: str, origin: str) -> TemplateMap:
    out: TemplateMap = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TemplateError(f"{origin}: line {line_no}: invalid JSON ({exc.msg})") from None
        try:
            template = PromptTemplate(
                prompt_language=record["language"],
                mode=record["mode"],
                pattern=record["pattern"],
                language_names=dict(record.get("language_names", {})),
            )
        except (TemplateError, KeyError, TypeError) as exc:
            raise TemplateError(f"{origin}: line {line_no}: {exc}") from None
        key = (template.prompt_language, template.mode)
        if key in out:
            raise TemplateError(f"{origin}: line {line_no}: duplicate template for {key}")
        out[key] = template
    return out


def load_templates(path=None) -> TemplateMap:
    """Load templates keyed by (prompt language, mode).

    Without a path, loads the shipped default file. A user file can hold any
    subset; merge over the defaults with ``dict.update`` to override.
    """
    if path is None:
        text = resources.files("translex").joinpath("data/templates.jsonl").read_text("utf-8")
        return _parse_template_lines(text, "default templates")
    path = Path(path)
    return _parse_template_lines(path.read_text(encoding="utf-8"), str(path))


def default_templates() -> TemplateMap:
    return load_templates(None)
