"""Parsers for WSD evaluation corpora.

Two input forms are supported: the unified XML format (corpus/text/sentence
elements with ``wf``/``instance`` tokens plus a separate gold key file) and a
native JSONL form with one instance object per line.
"""

from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from pathlib import Path

from .ontology import POS_TAGS, check_language_code


class CorpusError(ValueError):
    """Malformed corpus data or broken instance invariant."""


@dataclass
class WsdInstance:
    """One evaluation example: a word occurrence in a sentence.

    ``word_span`` is a character range [start, end) into ``sentence`` and must
    slice out exactly ``word_surface``. ``gold`` is None when no gold
    annotation is known; such instances are carried through parsing but
    excluded from metric denominators.
    """

    id: str
    language: str
    sentence: str
    word_surface: str
    word_span: tuple[int, int]
    lemma: str
    pos: str
    gold: frozenset[str] | None = None

    def __post_init__(self):
        if not self.id:
            raise CorpusError("instance id must be non-empty")
        check_language_code(self.language)
        if self.pos not in POS_TAGS:
            raise CorpusError(f"instance {self.id}: invalid pos {self.pos!r}")
        if not self.lemma:
            raise CorpusError(f"instance {self.id}: empty lemma")
        self.word_span = (int(self.word_span[0]), int(self.word_span[1]))
        start, end = self.word_span
        if not (0 <= start < end <= len(self.sentence)):
            raise CorpusError(f"instance {self.id}: span {self.word_span} out of range")
        if self.sentence[start:end] != self.word_surface:
            raise CorpusError(
                f"instance {self.id}: span text {self.sentence[start:end]!r} "
                f"does not match surface {self.word_surface!r}"
            )
        if self.gold is not None:
            self.gold = frozenset(self.gold)


@dataclass
class Corpus:
    language: str
    instances: list[WsdInstance]
    name: str = ""

    def __post_init__(self):
        check_language_code(self.language)
        seen = set()
        for inst in self.instances:
            if inst.language != self.language:
                raise CorpusError(
                    f"instance {inst.id}: language {inst.language!r} differs from corpus "
                    f"language {self.language!r}"
                )
            if inst.id in seen:
                raise CorpusError(f"duplicate instance id {inst.id!r}")
            seen.add(inst.id)


def _read_key_file(key_path) -> dict[str, set[str]]:
    """Parse a gold key file: one ``<instance-id> <sense-id>+`` per line.

    Repeated instance ids accumulate into one gold set.
    """
    gold: dict[str, set[str]] = {}
    text = Path(key_path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts:
            continue
        if len(parts) < 2:
            raise CorpusError(f"{key_path}: line {line_no}: expected '<id> <sense>+'")
        gold.setdefault(parts[0], set()).update(parts[1:])
    return gold


def _sidecar_config(data_path: Path) -> dict:
    sidecar = data_path.with_suffix(".config.json")
    if sidecar.exists():
        return json.loads(sidecar.read_text(encoding="utf-8"))
    return {}


def parse_xml_corpus(data_path, key_path=None, *, space_delimited: bool | None = None) -> Corpus:
    """Parse a unified-format XML corpus, optionally attaching gold labels.

    Sentences are stored as tokens; the raw text is reconstructed by joining
    tokens with single spaces, or with no separator when the corpus declares
    ``space_delimited: false`` in a sidecar ``<stem>.config.json`` (or via the
    keyword override). Word spans index into the reconstructed text.
    """
    data_path = Path(data_path)
    config = _sidecar_config(data_path)
    if space_delimited is None:
        space_delimited = bool(config.get("space_delimited", True))
    sep = " " if space_delimited else ""

    try:
        root = ET.parse(data_path).getroot()
    except ET.ParseError as exc:
        raise CorpusError(f"{data_path}: malformed XML ({exc})") from None
    if root.tag != "corpus":
        raise CorpusError(f"{data_path}: root element is {root.tag!r}, expected 'corpus'")
    language = (root.get("lang") or config.get("language") or "").lower()
    if not language:
        raise CorpusError(f"{data_path}: no corpus language (lang attribute or sidecar)")
    name = root.get("source") or data_path.stem

    instances: list[WsdInstance] = []
    for sentence_el in root.iter("sentence"):
        tokens: list[str] = []
        spans: list[tuple[int, int]] = []
        pending: list[tuple[ET.Element, int]] = []
        pos_chars = 0
        for token_el in sentence_el:
            if token_el.tag not in ("wf", "instance"):
                raise CorpusError(
                    f"{data_path}: unexpected element {token_el.tag!r} in sentence "
                    f"{sentence_el.get('id')!r}"
                )
            text = token_el.text
            if text is None:
                raise CorpusError(
                    f"{data_path}: empty token in sentence {sentence_el.get('id')!r}"
                )
            if tokens:
                pos_chars += len(sep)
            start = pos_chars
            pos_chars += len(text)
            tokens.append(text)
            spans.append((start, pos_chars))
            if token_el.tag == "instance":
                pending.append((token_el, len(tokens) - 1))
        sentence_text = sep.join(tokens)
        for inst_el, token_idx in pending:
            inst_id = inst_el.get("id")
            if not inst_id:
                raise CorpusError(
                    f"{data_path}: instance without id in sentence {sentence_el.get('id')!r}"
                )
            lemma = inst_el.get("lemma")
            if not lemma:
                raise CorpusError(f"{data_path}: instance {inst_id!r} has no lemma")
            pos = inst_el.get("pos")
            if not pos:
                raise CorpusError(f"{data_path}: instance {inst_id!r} has no pos")
            instances.append(
                WsdInstance(
                    id=inst_id,
                    language=language,
                    sentence=sentence_text,
                    word_surface=tokens[token_idx],
                    word_span=spans[token_idx],
                    lemma=lemma,
                    pos=pos,
                )
            )

    corpus = Corpus(language=language, instances=instances, name=name)
    if key_path is not None:
        corpus = attach_gold(corpus, key_path)
    return corpus


def attach_gold(corpus: Corpus, key_path) -> Corpus:
    """Return a corpus with gold sets from ``key_path`` applied.

    Every key line must name a known instance id. Instances absent from the
    key file keep their current gold (None after a fresh parse).
    """
    gold = _read_key_file(key_path)
    known = {inst.id for inst in corpus.instances}
    unknown = sorted(set(gold) - known)
    if unknown:
        raise CorpusError(f"{key_path}: unknown instance id {unknown[0]!r}")
    new_instances = [
        replace(inst, gold=frozenset(gold[inst.id])) if inst.id in gold else inst
        for inst in corpus.instances
    ]
    return Corpus(language=corpus.language, instances=new_instances, name=corpus.name)


def load_alternate_gold(corpus: Corpus, key_path) -> Corpus:
    """Replace gold sets for exactly the instances named in ``key_path``."""
    return attach_gold(corpus, key_path)


def parse_jsonl_corpus(path, *, language: str | None = None, name: str | None = None) -> Corpus:
    """Parse a JSONL corpus: one instance object per line.

    ``language`` defaults to the instances' shared language ("xx" for an
    empty file); ``name`` defaults to the file stem.
    """
    path = Path(path)
    instances: list[WsdInstance] = []
    text = path.read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: line {line_no}: invalid JSON ({exc.msg})") from None
        try:
            instances.append(instance_from_record(record))
        except (CorpusError, KeyError, TypeError) as exc:
            raise CorpusError(f"{path}: line {line_no}: {exc}") from None
    if language is None:
        language = instances[0].language if instances else "xx"
    return Corpus(language=language, instances=instances, name=name or path.stem)


def instance_from_record(record: dict) -> WsdInstance:
    gold = record.get("gold")
    return WsdInstance(
        id=record["id"],
        language=record["language"],
        sentence=record["sentence"],
        word_surface=record["word_surface"],
        word_span=tuple(record["word_span"]),
        lemma=record["lemma"],
        pos=record["pos"],
        gold=None if gold is None else frozenset(gold),
    )


def instance_to_record(inst: WsdInstance) -> dict:
    return {
        "id": inst.id,
        "language": inst.language,
        "sentence": inst.sentence,
        "word_surface": inst.word_surface,
        "word_span": list(inst.word_span),
        "lemma": inst.lemma,
        "pos": inst.pos,
        "gold": sorted(inst.gold) if inst.gold is not None else None,
    }


def write_jsonl_corpus(corpus: Corpus, path) -> None:
    """Emit a corpus in the JSONL form that ``parse_jsonl_corpus`` reads back."""
    lines = [json.dumps(instance_to_record(i), ensure_ascii=False, sort_keys=True)
             for i in corpus.instances]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
