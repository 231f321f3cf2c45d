"""File-based multilingual sense inventory: loading, validation, and queries.

The inventory is a JSONL snapshot with two record kinds: ``synset`` records
carrying per-language lemma lists (plus optional definitions and example
sentences), and ``entry`` records mapping a (lemma, language, pos) word key
to an ordered sense list whose first element is the most common sense.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

POS_TAGS = frozenset({"NOUN", "VERB", "ADJ", "ADV"})

_LANG_RE = re.compile(r"^[a-z]{2}$")


class OntologyError(ValueError):
    """Malformed snapshot file or broken inventory invariant."""


def check_language_code(code) -> str:
    if not isinstance(code, str) or not _LANG_RE.match(code):
        raise OntologyError(
            f"invalid language code {code!r}: expected exactly two lowercase ASCII letters"
        )
    return code


def surface_text(lemma: str) -> str:
    """Render a stored lemma for use in prompts (underscores become spaces)."""
    return lemma.replace("_", " ")


@dataclass(frozen=True)
class WordKey:
    """A lookup key for a word: lemma + language + part of speech.

    The lemma is folded to lowercase on construction, so keys compare
    case-insensitively.
    """

    lemma: str
    language: str
    pos: str

    def __post_init__(self):
        if not self.lemma:
            raise OntologyError("word key lemma must be non-empty")
        object.__setattr__(self, "lemma", self.lemma.lower())
        check_language_code(self.language)
        if self.pos not in POS_TAGS:
            raise OntologyError(f"invalid pos {self.pos!r}: expected one of {sorted(POS_TAGS)}")

    def __str__(self):
        return f"{self.lemma}/{self.language}/{self.pos}"


@dataclass
class Synset:
    """One sense: multilingual lemma sets plus optional glosses and examples."""

    id: str
    lemmas: dict[str, list[str]]
    definitions: dict[str, str] = field(default_factory=dict)
    examples: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if not self.id:
            raise OntologyError("synset id must be non-empty")
        for lang, lemma_list in self.lemmas.items():
            check_language_code(lang)
            if not lemma_list:
                raise OntologyError(f"synset {self.id}: empty lemma list for {lang!r}")
            if len(set(lemma_list)) != len(lemma_list):
                raise OntologyError(f"synset {self.id}: duplicate lemmas for {lang!r}")
            if any(not l for l in lemma_list):
                raise OntologyError(f"synset {self.id}: empty lemma string for {lang!r}")
        for lang in self.definitions:
            check_language_code(lang)
        for lang in self.examples:
            check_language_code(lang)


@dataclass
class Ontology:
    """Validated, immutable-after-load sense inventory.

    ``entries`` maps word keys to sense id lists ordered by frequency rank
    (index 0 is the most common sense); ``synsets`` resolves sense ids.
    """

    entries: dict[WordKey, list[str]]
    synsets: dict[str, Synset]

    @classmethod
    def build(cls, entries: dict[WordKey, list[str]], synsets: dict[str, Synset]) -> "Ontology":
        """Construct an ontology, checking every inventory invariant."""
        for key, sense_ids in entries.items():
            if not sense_ids:
                raise OntologyError(f"entry {key}: empty sense list")
            if len(set(sense_ids)) != len(sense_ids):
                raise OntologyError(f"entry {key}: duplicate sense ids")
            for sid in sense_ids:
                syn = synsets.get(sid)
                if syn is None:
                    raise OntologyError(f"entry {key}: sense {sid!r} not found among synsets")
                listed = [l.lower() for l in syn.lemmas.get(key.language, [])]
                if key.lemma not in listed:
                    raise OntologyError(
                        f"entry {key}: synset {sid!r} does not list the lemma for {key.language!r}"
                    )
        return cls(entries=entries, synsets=synsets)

    def senses(self, w: WordKey) -> list[str]:
        """Ordered sense ids for ``w``; empty list if out of vocabulary."""
        return list(self.entries.get(w, ()))

    def mcs(self, w: WordKey) -> str | None:
        """Most common sense of ``w`` (first-ranked), or None if OOV."""
        sense_ids = self.entries.get(w)
        return sense_ids[0] if sense_ids else None

    def translations(self, w: WordKey, target: str) -> dict[str, set[str]]:
        """Translation inventory of ``w`` into ``target``.

        Maps each target-language surface form to the set of senses of ``w``
        whose synsets list it. Empty when no sense has a lemma in ``target``.
        """
        check_language_code(target)
        out: dict[str, set[str]] = {}
        for sid in self.entries.get(w, ()):
            for lemma in self.synsets[sid].lemmas.get(target, ()):
                out.setdefault(lemma, set()).add(sid)
        return out

    def coverage(self, instances, target: str) -> float:
        """Fraction of instances whose word has any translation into ``target``.

        An empty instance list counts as fully covered (1.0).
        """
        if not instances:
            return 1.0
        covered = sum(
            1
            for inst in instances
            if self.translations(WordKey(inst.lemma, inst.language, inst.pos), target)
        )
        return covered / len(instances)

    def all_lemmas(self, language: str) -> set[str]:
        """All surface forms listed for ``language`` across the inventory."""
        check_language_code(language)
        out: set[str] = set()
        for syn in self.synsets.values():
            out.update(syn.lemmas.get(language, ()))
        return out


def _require(record: dict, key: str, line_no: int):
    if key not in record:
        raise OntologyError(f"line {line_no}: record missing required field {key!r}")
    return record[key]


def _parse_synset(record: dict, line_no: int) -> Synset:
    sid = _require(record, "id", line_no)
    lemmas = _require(record, "lemmas", line_no)
    if not isinstance(sid, str) or not isinstance(lemmas, dict):
        raise OntologyError(f"line {line_no}: bad synset field types")
    defs = record.get("definitions", {})
    examples = record.get("examples", {})
    if not isinstance(defs, dict) or not isinstance(examples, dict):
        raise OntologyError(f"line {line_no}: definitions/examples must be objects")
    try:
        return Synset(id=sid, lemmas={k: list(v) for k, v in lemmas.items()},
                      definitions=dict(defs), examples=dict(examples))
    except OntologyError as exc:
        raise OntologyError(f"line {line_no}: {exc}") from None


def _parse_entry(record: dict, line_no: int) -> tuple[WordKey, list[str]]:
    lemma = _require(record, "lemma", line_no)
    language = _require(record, "language", line_no)
    pos = _require(record, "pos", line_no)
    sense_ids = _require(record, "senses", line_no)
    if not isinstance(sense_ids, list) or not all(isinstance(s, str) for s in sense_ids):
        raise OntologyError(f"line {line_no}: entry senses must be a list of strings")
    try:
        key = WordKey(lemma, language, pos)
    except OntologyError as exc:
        raise OntologyError(f"line {line_no}: {exc}") from None
    return key, sense_ids


def load_ontology(path) -> Ontology:
    """Load and validate an ontology snapshot (JSONL, UTF-8, no BOM).

    Raises OntologyError naming the offending line for malformed records and
    the offending word key or sense id for invariant violations.
    """
    path = Path(path)
    raw = path.read_bytes()
    if raw.startswith(b"\xef\xbb\xbf"):
        raise OntologyError(f"{path}: file starts with a UTF-8 BOM")
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise OntologyError(f"{path}: not valid UTF-8 ({exc})") from None

    entries: dict[WordKey, list[str]] = {}
    synsets: dict[str, Synset] = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise OntologyError(f"line {line_no}: invalid JSON ({exc.msg})") from None
        if not isinstance(record, dict):
            raise OntologyError(f"line {line_no}: record is not a JSON object")
        kind = record.get("kind")
        if kind == "synset":
            syn = _parse_synset(record, line_no)
            if syn.id in synsets:
                raise OntologyError(f"line {line_no}: duplicate synset id {syn.id!r}")
            synsets[syn.id] = syn
        elif kind == "entry":
            key, sense_ids = _parse_entry(record, line_no)
            if key in entries:
                raise OntologyError(f"line {line_no}: duplicate entry for {key}")
            entries[key] = sense_ids
        else:
            raise OntologyError(f"line {line_no}: unknown record kind {kind!r}")
    return Ontology.build(entries, synsets)


def write_ontology(ontology: Ontology, path) -> None:
    """Write a snapshot that ``load_ontology`` reads back identically."""
    path = Path(path)
    lines = []
    for syn in ontology.synsets.values():
        rec = {"kind": "synset", "id": syn.id, "lemmas": syn.lemmas}
        if syn.definitions:
            rec["definitions"] = syn.definitions
        if syn.examples:
            rec["examples"] = syn.examples
        lines.append(json.dumps(rec, ensure_ascii=False, sort_keys=True))
    for key, sense_ids in ontology.entries.items():
        rec = {"kind": "entry", "lemma": key.lemma, "language": key.language,
               "pos": key.pos, "senses": sense_ids}
        lines.append(json.dumps(rec, ensure_ascii=False, sort_keys=True))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
