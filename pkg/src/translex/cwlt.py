"""Word-level translation benchmark: dataset construction and metrics.

Builds <word, example context, translations> evaluation tuples from the
ontology, scores candidate translations with and without the context
sentence in the prompt, and computes accuracy, NLL, and error-reduction
statistics over the results.
"""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .ontology import Ontology, WordKey, surface_text
from .prompting import WITH_CONTEXT, WITHOUT_CONTEXT, TemplateMap, render_parts
from .scoring import ScoreRequest, Scorer

GENERATOR_ID = "sorted-pool-random-sample-v1"


class CwltError(ValueError):
    """Dataset construction or evaluation failure."""


@dataclass
class CwltExample:
    """One benchmark tuple for a single sense of an ambiguous word.

    ``correct`` holds the target-language translations of ``sense``;
    ``negatives`` holds the translations of the contrasting sense(s) of the
    word (kept separately in ``sense_negatives``) plus randomly drawn
    target-language lemmas. ``surface`` is the form of the word as it occurs
    in ``context``.
    """

    id: str
    word: WordKey
    sense: str
    context: str
    surface: str
    target_language: str
    correct: frozenset[str]
    negatives: frozenset[str]
    sense_negatives: frozenset[str] = frozenset()

    def __post_init__(self):
        self.correct = frozenset(self.correct)
        self.negatives = frozenset(self.negatives)
        self.sense_negatives = frozenset(self.sense_negatives)
        if not self.correct:
            raise CwltError(f"example {self.id}: empty correct set")
        if self.correct & self.negatives:
            raise CwltError(f"example {self.id}: correct and negatives overlap")
        if not self.sense_negatives <= self.negatives:
            raise CwltError(f"example {self.id}: sense_negatives not within negatives")
        if not self.surface or self.surface not in self.context:
            raise CwltError(
                f"example {self.id}: surface {self.surface!r} not found in context"
            )

    @property
    def candidates(self) -> frozenset[str]:
        return self.correct | self.negatives


@dataclass
class CwltResult:
    example: CwltExample
    mode: str
    ranked: list[tuple[str, float]]

    def __post_init__(self):
        if {s for s, _ in self.ranked} != set(self.example.candidates):
            raise CwltError(
                f"result for {self.example.id}: ranked surfaces do not cover the candidates"
            )


@dataclass
class DatasetBuild:
    """A built dataset plus the bookkeeping that goes into its manifest."""

    examples: list[CwltExample]
    source: str
    target: str
    seed: int
    n_random_negatives: int
    rejections: dict[str, int] = field(default_factory=dict)
    words_considered: int = 0

    def manifest(self) -> dict:
        return {
            "kind": "manifest",
            "source": self.source,
            "target": self.target,
            "seed": self.seed,
            "n_random_negatives": self.n_random_negatives,
            "generator": GENERATOR_ID,
            "words_considered": self.words_considered,
            "examples": len(self.examples),
            "rejections": dict(sorted(self.rejections.items())),
        }


def _find_surface(context: str, lemma: str) -> str | None:
    """Locate the lemma in an example context, case-insensitively."""
    needle = surface_text(lemma)
    idx = context.lower().find(needle.lower())
    if idx < 0:
        return None
    return context[idx: idx + len(needle)]


def build_dataset(o: Ontology, source: str, target: str,
                  n_random_negatives: int = 50, seed: int = 0) -> DatasetBuild:
    """Construct benchmark examples for every qualifying source word.

    A word qualifies when its first sense and at least one other sense (a)
    have disjoint, non-empty translation sets in the target language and (b)
    carry a source-language example context containing the word. One example
    is emitted per qualifying sense; the first sense is emitted once, with
    the union of its qualifying partners' translations as sense negatives.
    Random negatives are drawn uniformly without replacement from the
    target-language lemma pool, excluding every translation of any sense of
    the word; the draw is deterministic for a fixed seed.
    """
    pool_all = sorted(o.all_lemmas(target))
    if not pool_all:
        raise CwltError(f"ontology has no lemmas in target language {target!r}")
    rng = random.Random(seed)
    rejections: Counter = Counter()
    examples: list[CwltExample] = []

    words = sorted((w for w in o.entries if w.language == source),
                   key=lambda w: (w.lemma, w.pos))
    for w in words:
        sense_ids = o.senses(w)
        if len(sense_ids) < 2:
            rejections["single_sense"] += 1
            continue
        trans = {sid: set(o.synsets[sid].lemmas.get(target, ())) for sid in sense_ids}
        context = {sid: o.synsets[sid].examples.get(source) for sid in sense_ids}
        surface = {sid: _find_surface(context[sid], w.lemma) if context[sid] else None
                   for sid in sense_ids}

        first = sense_ids[0]
        if not trans[first]:
            rejections["first_sense_no_translations"] += 1
            continue
        if surface[first] is None:
            rejections["first_sense_no_context"] += 1
            continue

        partners = [sid for sid in sense_ids[1:]
                    if trans[sid] and not (trans[sid] & trans[first])
                    and surface[sid] is not None]
        if not partners:
            rejections["no_qualifying_partner"] += 1
            continue

        excluded = set().union(*trans.values())

        def emit(sid: str, sense_negs: set[str]):
            pool = [l for l in pool_all if l not in excluded]
            if len(pool) < n_random_negatives:
                raise CwltError(
                    f"word {w}: only {len(pool)} candidate negative lemmas available, "
                    f"{n_random_negatives} requested"
                )
            randoms = rng.sample(pool, n_random_negatives)
            examples.append(CwltExample(
                id=f"{w.lemma}.{w.pos}.{source}-{target}.{sid}",
                word=w,
                sense=sid,
                context=context[sid],
                surface=surface[sid],
                target_language=target,
                correct=frozenset(trans[sid]),
                negatives=frozenset(sense_negs) | frozenset(randoms),
                sense_negatives=frozenset(sense_negs),
            ))

        emit(first, set().union(*(trans[p] for p in partners)))
        for partner in partners:
            emit(partner, trans[first])

    return DatasetBuild(examples=examples, source=source, target=target, seed=seed,
                        n_random_negatives=n_random_negatives,
                        rejections=dict(rejections), words_considered=len(words))


def run_cwlt(examples: list[CwltExample], templates: TemplateMap,
             scorer: Scorer, mode: str) -> list[CwltResult]:
    """Score every example's candidate set under the given prompt mode.

    The candidate set is identical between modes; only the prompt changes.
    """
    if mode not in (WITH_CONTEXT, WITHOUT_CONTEXT):
        raise CwltError(f"unknown mode {mode!r}")
    results = []
    for ex in examples:
        template = templates.get((ex.word.language, mode))
        if template is None:
            raise CwltError(f"no {mode} template for prompt language {ex.word.language!r}")
        prompt = render_parts(template, sentence=ex.context, word=ex.surface,
                              target=ex.target_language)
        surfaces = sorted(ex.candidates)
        continuation_of = {s: prompt.continuation(surface_text(s)) for s in surfaces}
        request = ScoreRequest(prefix=prompt.prefix,
                               continuations=tuple(dict.fromkeys(continuation_of.values())))
        nll = scorer.score(request).nll
        ranked = sorted(((s, nll[continuation_of[s]]) for s in surfaces),
                        key=lambda kv: (kv[1], continuation_of[kv[0]].encode("utf-8"),
                                        kv[0].encode("utf-8")))
        results.append(CwltResult(example=ex, mode=mode, ranked=ranked))
    return results


def oracle_rules_for_examples(examples: list[CwltExample],
                              templates: TemplateMap) -> tuple:
    """Per-example oracle rules mapping each rendered prompt prefix to the
    exact continuations of that example's correct translations.

    With these rules the oracle scorer answers each example's own prompt with
    its own correct set. Examples of the same word share an identical
    context-free prompt and therefore merge their rules in that mode, so a
    perfect context-free score needs one example per word.
    """
    rules = []
    for ex in examples:
        for mode in (WITH_CONTEXT, WITHOUT_CONTEXT):
            template = templates.get((ex.word.language, mode))
            if template is None:
                continue
            prompt = render_parts(template, sentence=ex.context, word=ex.surface,
                                  target=ex.target_language)
            goods = frozenset(prompt.continuation(surface_text(s)) for s in ex.correct)
            rules.append((prompt.prefix, goods))
    return tuple(rules)


def top1_accuracy(results: list[CwltResult]) -> float:
    """Fraction of examples whose best-scored candidate is a correct translation."""
    if not results:
        raise CwltError("no results")
    hits = sum(1 for r in results if r.ranked[0][0] in r.example.correct)
    return hits / len(results)


def all_translations_accuracy(results: list[CwltResult]) -> float:
    """Fraction of examples where the k correct translations fill the top k ranks."""
    if not results:
        raise CwltError("no results")
    hits = 0
    for r in results:
        k = len(r.example.correct)
        if {s for s, _ in r.ranked[:k]} == set(r.example.correct):
            hits += 1
    return hits / len(results)


def nll_stats(results: list[CwltResult]) -> dict:
    """Mean NLL of best correct translations vs. all incorrect candidates.

    The ratio is incorrect over correct, so larger means better separation.
    A zero correct mean leaves the ratio undefined (None).
    """
    if not results:
        raise CwltError("no results")
    best_correct = []
    incorrect = []
    for r in results:
        values = dict(r.ranked)
        best_correct.append(min(values[s] for s in r.example.correct))
        wrong = [values[s] for s in r.example.negatives]
        if not wrong:
            raise CwltError(f"example {r.example.id} has no incorrect candidates")
        incorrect.extend(wrong)
    mean_correct = sum(best_correct) / len(best_correct)
    mean_incorrect = sum(incorrect) / len(incorrect)
    ratio = mean_incorrect / mean_correct if mean_correct > 0 else None
    return {"mean_nll_correct": mean_correct, "mean_nll_incorrect": mean_incorrect,
            "ratio": ratio}


DISAMBIGUATION = "disambiguation"
TRANSLATION = "translation"


def classify_error(result: CwltResult) -> str | None:
    """Error class of a result, or None when its top-1 is correct.

    A wrong top-1 that translates another sense of the word is a
    disambiguation error; one that translates no sense of the word is a
    translation error. Negatives are built from exactly those two pools, so
    the classes partition the errors.
    """
    top = result.ranked[0][0]
    if top in result.example.correct:
        return None
    if top in result.example.sense_negatives:
        return DISAMBIGUATION
    return TRANSLATION


def error_reduction(no_ctx: list[CwltResult], ctx: list[CwltResult]) -> dict:
    """Rates at which adding context fixes each class of contextless error."""
    by_id_ctx = {r.example.id: r for r in ctx}
    if {r.example.id for r in no_ctx} != set(by_id_ctx):
        raise CwltError("error_reduction: result lists cover different examples")
    counts = {DISAMBIGUATION: 0, TRANSLATION: 0}
    fixed = {DISAMBIGUATION: 0, TRANSLATION: 0}
    for r in no_ctx:
        cls = classify_error(r)
        if cls is None:
            continue
        counts[cls] += 1
        if by_id_ctx[r.example.id].ranked[0][0] in r.example.correct:
            fixed[cls] += 1
    def rate(cls):
        return fixed[cls] / counts[cls] if counts[cls] else None
    return {
        "disambiguation_errors": counts[DISAMBIGUATION],
        "translation_errors": counts[TRANSLATION],
        "disambiguation_fixed_rate": rate(DISAMBIGUATION),
        "translation_fixed_rate": rate(TRANSLATION),
    }


# dataset and result files

def example_to_record(ex: CwltExample) -> dict:
    return {
        "id": ex.id,
        "lemma": ex.word.lemma,
        "language": ex.word.language,
        "pos": ex.word.pos,
        "sense": ex.sense,
        "context": ex.context,
        "surface": ex.surface,
        "target_language": ex.target_language,
        "correct": sorted(ex.correct),
        "negatives": sorted(ex.negatives),
        "sense_negatives": sorted(ex.sense_negatives),
    }


def example_from_record(record: dict) -> CwltExample:
    return CwltExample(
        id=record["id"],
        word=WordKey(record["lemma"], record["language"], record["pos"]),
        sense=record["sense"],
        context=record["context"],
        surface=record["surface"],
        target_language=record["target_language"],
        correct=frozenset(record["correct"]),
        negatives=frozenset(record["negatives"]),
        sense_negatives=frozenset(record.get("sense_negatives", ())),
    )


def write_dataset(build: DatasetBuild, path) -> None:
    """Write the manifest line followed by one example per line."""
    lines = [json.dumps(build.manifest(), ensure_ascii=False, sort_keys=True)]
    lines += [json.dumps(example_to_record(ex), ensure_ascii=False, sort_keys=True)
              for ex in build.examples]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_dataset(path) -> tuple[dict, list[CwltExample]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines:
        raise CwltError(f"{path}: empty dataset file")
    manifest = json.loads(lines[0])
    if manifest.get("kind") != "manifest":
        raise CwltError(f"{path}: first line is not a manifest record")
    examples = []
    for line_no, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            examples.append(example_from_record(json.loads(line)))
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise CwltError(f"{path}: line {line_no}: {exc}") from None
    return manifest, examples


def result_to_record(result: CwltResult) -> dict:
    return {"example_id": result.example.id, "mode": result.mode,
            "ranked": [[s, v] for s, v in result.ranked]}


def write_results(results: list[CwltResult], path) -> None:
    lines = [json.dumps(result_to_record(r), ensure_ascii=False, sort_keys=True)
             for r in results]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
