"""Sense disambiguation through in-context translation.

For each instance, the word is translated into one or more target languages
by ranking its translation inventory under a fill-in prompt; the predicted
sense set is the intersection of the word's senses with the senses of the
top-scoring translation. With several target languages, the senses that
appear in the most per-target top-translation sense sets are kept. Backoff
policies cover instances with no translations in any requested target.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .corpora import Corpus, WsdInstance
from .ontology import Ontology, WordKey, surface_text
from .prompting import WITH_CONTEXT, TemplateMap, render
from .scoring import ScoreRequest, Scorer

PROMPT_POLICIES = ("english", "source", "target")

BACKOFF_NONE = "none"
BACKOFF_ENGLISH = "english_target"
BACKOFF_MCS = "mcs"
BACKOFF_EMPTY = "empty"


class WsdError(ValueError):
    pass


class OovWordError(WsdError):
    """The instance's word has no senses in the ontology."""

    def __init__(self, word: WordKey):
        super().__init__(f"word {word} not in ontology")
        self.word = word


@dataclass
class EnsembleConfig:
    """Target languages and fallback policy for a disambiguation run."""

    targets: tuple[str, ...]
    prompt_language_policy: str = "english"
    backoff_to_english: bool = True
    final_backoff: str = BACKOFF_MCS

    def __post_init__(self):
        self.targets = tuple(self.targets)
        if not self.targets:
            raise WsdError("ensemble needs at least one target language")
        if len(set(self.targets)) != len(self.targets):
            raise WsdError("duplicate target languages")
        if self.prompt_language_policy not in PROMPT_POLICIES:
            raise WsdError(f"unknown prompt language policy {self.prompt_language_policy!r}")
        if self.final_backoff not in (BACKOFF_MCS, BACKOFF_EMPTY):
            raise WsdError(f"unknown final backoff {self.final_backoff!r}")


@dataclass
class Prediction:
    instance_id: str
    predicted: frozenset[str]
    per_target: dict[str, tuple[str, float]] = field(default_factory=dict)
    backoff: str = BACKOFF_NONE
    dropped_targets: frozenset[str] = frozenset()

    def __post_init__(self):
        self.predicted = frozenset(self.predicted)
        self.dropped_targets = frozenset(self.dropped_targets)


def word_key_of(instance: WsdInstance) -> WordKey:
    return WordKey(instance.lemma, instance.language, instance.pos)


def _prompt_language(policy: str, instance: WsdInstance, target: str) -> str:
    if policy == "english":
        return "en"
    if policy == "source":
        return instance.language
    return target


@dataclass(frozen=True)
class _TargetHit:
    top_surface: str
    nll: float
    senses: frozenset[str]


def _score_target(o: Ontology, instance: WsdInstance, w: WordKey, target: str,
                  templates: TemplateMap, scorer: Scorer, policy: str) -> _TargetHit | None:
    """Rank the word's translation inventory in one target language.

    Returns None when the word has no translations into the target. The
    sense set of the top translation is read off the translation inventory,
    so it is already restricted to senses of the word.
    """
    trans = o.translations(w, target)
    if not trans:
        return None
    prompt_lang = _prompt_language(policy, instance, target)
    template = templates.get((prompt_lang, WITH_CONTEXT))
    if template is None:
        raise WsdError(f"no {WITH_CONTEXT} template for prompt language {prompt_lang!r}")
    prompt = render(template, instance, target)
    surfaces = sorted(trans)
    continuation_of = {s: prompt.continuation(surface_text(s)) for s in surfaces}
    request = ScoreRequest(prefix=prompt.prefix,
                           continuations=tuple(dict.fromkeys(continuation_of.values())))
    ranked = scorer.rank(request)
    top_continuation, top_nll = ranked[0]
    top_surface = min(s for s in surfaces if continuation_of[s] == top_continuation)
    return _TargetHit(top_surface=top_surface, nll=top_nll,
                      senses=frozenset(trans[top_surface]))


def _english_backoff_allowed(config_backoff: bool, instance: WsdInstance) -> bool:
    # English evaluation data falls through to the final backoff instead.
    return config_backoff and instance.language != "en"


def disambiguate_single(o: Ontology, instance: WsdInstance, target: str,
                        templates: TemplateMap, scorer: Scorer, *,
                        prompt_language_policy: str = "english",
                        backoff_to_english: bool = True,
                        final_backoff: str = BACKOFF_MCS) -> Prediction:
    """Disambiguate via translation into a single target language."""
    w = word_key_of(instance)
    sense_ids = o.senses(w)
    if not sense_ids:
        raise OovWordError(w)
    hit = _score_target(o, instance, w, target, templates, scorer, prompt_language_policy)
    if hit is not None:
        return Prediction(instance_id=instance.id,
                          predicted=hit.senses & frozenset(sense_ids),
                          per_target={target: (hit.top_surface, hit.nll)})
    dropped = frozenset([target])
    if _english_backoff_allowed(backoff_to_english, instance) and target != "en":
        ehit = _score_target(o, instance, w, "en", templates, scorer,
                             prompt_language_policy)
        if ehit is not None:
            return Prediction(instance_id=instance.id,
                              predicted=ehit.senses & frozenset(sense_ids),
                              per_target={"en": (ehit.top_surface, ehit.nll)},
                              backoff=BACKOFF_ENGLISH, dropped_targets=dropped)
    if final_backoff == BACKOFF_MCS:
        return Prediction(instance_id=instance.id, predicted=frozenset([sense_ids[0]]),
                          backoff=BACKOFF_MCS, dropped_targets=dropped)
    return Prediction(instance_id=instance.id, predicted=frozenset(),
                      backoff=BACKOFF_EMPTY, dropped_targets=dropped)


def disambiguate_ensemble(o: Ontology, instance: WsdInstance, config: EnsembleConfig,
                          templates: TemplateMap, scorer: Scorer) -> Prediction:
    """Disambiguate by ensembling top translations across target languages.

    Targets without translations for this instance are dropped; the senses
    keeping the highest multiplicity across the remaining targets' top
    translations form the prediction. English backoff engages only when no
    target is usable.
    """
    w = word_key_of(instance)
    sense_ids = o.senses(w)
    if not sense_ids:
        raise OovWordError(w)
    hits: dict[str, _TargetHit] = {}
    dropped = set()
    for target in config.targets:
        hit = _score_target(o, instance, w, target, templates, scorer,
                            config.prompt_language_policy)
        if hit is None:
            dropped.add(target)
        else:
            hits[target] = hit

    if hits:
        multiplicity: Counter = Counter()
        for hit in hits.values():
            multiplicity.update(hit.senses)
        top_count = max(multiplicity.values())
        ensembled = frozenset(s for s, n in multiplicity.items() if n == top_count)
        return Prediction(
            instance_id=instance.id,
            predicted=ensembled & frozenset(sense_ids),
            per_target={t: (h.top_surface, h.nll) for t, h in hits.items()},
            dropped_targets=frozenset(dropped),
        )

    if _english_backoff_allowed(config.backoff_to_english, instance):
        ehit = _score_target(o, instance, w, "en", templates, scorer,
                             config.prompt_language_policy)
        if ehit is not None:
            return Prediction(instance_id=instance.id,
                              predicted=ehit.senses & frozenset(sense_ids),
                              per_target={"en": (ehit.top_surface, ehit.nll)},
                              backoff=BACKOFF_ENGLISH,
                              dropped_targets=frozenset(dropped))
    if config.final_backoff == BACKOFF_MCS:
        return Prediction(instance_id=instance.id, predicted=frozenset([sense_ids[0]]),
                          backoff=BACKOFF_MCS, dropped_targets=frozenset(dropped))
    return Prediction(instance_id=instance.id, predicted=frozenset(),
                      backoff=BACKOFF_EMPTY, dropped_targets=frozenset(dropped))


def _check_templates(corpus: Corpus, config: EnsembleConfig, templates: TemplateMap):
    policy = config.prompt_language_policy
    if policy == "english":
        needed = {"en"}
    elif policy == "source":
        needed = {corpus.language}
    else:
        needed = set(config.targets)
        if config.backoff_to_english and corpus.language != "en":
            needed.add("en")
    for lang in sorted(needed):
        if (lang, WITH_CONTEXT) not in templates:
            raise WsdError(f"no {WITH_CONTEXT} template for prompt language {lang!r}")


def _prefetch(o: Ontology, corpus: Corpus, config: EnsembleConfig,
              templates: TemplateMap, scorer: Scorer) -> None:
    """Warm the scorer cache with every request the run will issue.

    Purely an optimization: requests fan out up to the scorer's concurrency
    limit, and the sequential pass afterwards hits the cache.
    """
    requests = []
    for instance in corpus.instances:
        if instance.gold is None:
            continue
        w = word_key_of(instance)
        if not o.senses(w):
            continue
        usable = []
        for target in config.targets:
            trans = o.translations(w, target)
            if not trans:
                continue
            usable.append(target)
            requests.append(_build_request(o, instance, w, target, templates, config))
        if not usable and _english_backoff_allowed(config.backoff_to_english, instance):
            if o.translations(w, "en"):
                requests.append(_build_request(o, instance, w, "en", templates, config))
    scorer.score_many(requests)


def _build_request(o, instance, w, target, templates, config) -> ScoreRequest:
    prompt_lang = _prompt_language(config.prompt_language_policy, instance, target)
    template = templates.get((prompt_lang, WITH_CONTEXT))
    if template is None:
        raise WsdError(f"no {WITH_CONTEXT} template for prompt language {prompt_lang!r}")
    prompt = render(template, instance, target)
    continuations = dict.fromkeys(
        prompt.continuation(surface_text(s)) for s in sorted(o.translations(w, target)))
    return ScoreRequest(prefix=prompt.prefix, continuations=tuple(continuations))


def predict_corpus(o: Ontology, corpus: Corpus, config: EnsembleConfig,
                   templates: TemplateMap, scorer: Scorer,
                   *, prefetch: bool | None = None) -> tuple[list[Prediction], dict]:
    """Predict every gold-bearing instance; returns predictions and a run report.

    OOV words are skipped and counted. Predictions come back in corpus order.
    """
    _check_templates(corpus, config, templates)
    if prefetch is None:
        prefetch = scorer.config.max_in_flight > 1
    if prefetch:
        _prefetch(o, corpus, config, templates, scorer)

    predictions: list[Prediction] = []
    skipped_oov: list[str] = []
    skipped_no_gold = 0
    backoffs = Counter()
    dropped_histogram: Counter = Counter()
    for instance in corpus.instances:
        if instance.gold is None:
            skipped_no_gold += 1
            continue
        try:
            pred = disambiguate_ensemble(o, instance, config, templates, scorer)
        except OovWordError:
            skipped_oov.append(instance.id)
            continue
        predictions.append(pred)
        backoffs[pred.backoff] += 1
        dropped_histogram.update(pred.dropped_targets)

    report = {
        "corpus": corpus.name,
        "language": corpus.language,
        "instances": len(corpus.instances),
        "gold_bearing": len(corpus.instances) - skipped_no_gold,
        "predicted": len(predictions),
        "backoff_english": backoffs[BACKOFF_ENGLISH],
        "backoff_mcs": backoffs[BACKOFF_MCS],
        "backoff_empty": backoffs[BACKOFF_EMPTY],
        "skipped_oov": len(skipped_oov),
        "skipped_oov_ids": skipped_oov,
        "skipped_no_gold": skipped_no_gold,
        "dropped_target_histogram": dict(sorted(dropped_histogram.items())),
    }
    return predictions, report


def language_pool_rankings(o: Ontology, corpus: Corpus, *, prompt_language: str,
                           target: str, templates: TemplateMap, scorer: Scorer
                           ) -> list[list[tuple[str, float, frozenset[str]]]]:
    """Rank, per instance, the union of the word's translation inventories in
    the prompt, source, and target languages, labeling each candidate with
    every language it belongs to.

    Instances whose pooled inventory is empty (or whose word is OOV) are
    skipped. Feeds the prediction-language distribution metric.
    """
    template = templates.get((prompt_language, WITH_CONTEXT))
    if template is None:
        raise WsdError(f"no {WITH_CONTEXT} template for prompt language {prompt_language!r}")
    pools = []
    for instance in corpus.instances:
        w = word_key_of(instance)
        if not o.senses(w):
            continue
        languages = {prompt_language, instance.language, target}
        labels: dict[str, set[str]] = {}
        for lang in sorted(languages):
            for surf in o.translations(w, lang):
                labels.setdefault(surf, set()).add(lang)
        if not labels:
            continue
        prompt = render(template, instance, target)
        surfaces = sorted(labels)
        continuation_of = {s: prompt.continuation(surface_text(s)) for s in surfaces}
        request = ScoreRequest(prefix=prompt.prefix,
                               continuations=tuple(dict.fromkeys(continuation_of.values())))
        nll = scorer.score(request).nll
        ranked = sorted(
            ((s, nll[continuation_of[s]], frozenset(labels[s])) for s in surfaces),
            key=lambda item: (item[1], continuation_of[item[0]].encode("utf-8"),
                              item[0].encode("utf-8")))
        pools.append(ranked)
    return pools


# prediction files

def prediction_to_record(pred: Prediction) -> dict:
    return {
        "instance_id": pred.instance_id,
        "predicted": sorted(pred.predicted),
        "per_target": {t: [s, v] for t, (s, v) in sorted(pred.per_target.items())},
        "backoff": pred.backoff,
        "dropped_targets": sorted(pred.dropped_targets),
    }


def prediction_from_record(record: dict) -> Prediction:
    return Prediction(
        instance_id=record["instance_id"],
        predicted=frozenset(record["predicted"]),
        per_target={t: (sv[0], float(sv[1])) for t, sv in record.get("per_target", {}).items()},
        backoff=record.get("backoff", BACKOFF_NONE),
        dropped_targets=frozenset(record.get("dropped_targets", ())),
    )


def write_predictions(predictions: list[Prediction], path) -> None:
    lines = [json.dumps(prediction_to_record(p), ensure_ascii=False, sort_keys=True)
             for p in predictions]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_predictions(path) -> list[Prediction]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            out.append(prediction_from_record(json.loads(line)))
    return out
