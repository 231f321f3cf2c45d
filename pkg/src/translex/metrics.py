"""Evaluation metrics and report emission for sense disambiguation runs.

Recall counts a prediction as a hit when it shares at least one sense with
the gold set; the Jaccard index penalizes over-prediction; delta measures
how much larger the normalized predicted set is than a single-label
predictor's. Reports are emitted as JSON (validated by shipped schemas) and
as aligned plain-text tables with one row per corpus plus an average row.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .corpora import Corpus, WsdInstance
from .ontology import Ontology
from .wsd import BACKOFF_MCS, Prediction, word_key_of


class MetricsError(ValueError):
    pass


def _instance_index(corpus: Corpus) -> dict[str, WsdInstance]:
    return {inst.id: inst for inst in corpus.instances}


def _gold_for(pred: Prediction, instances: dict[str, WsdInstance]) -> frozenset[str]:
    inst = instances.get(pred.instance_id)
    if inst is None:
        raise MetricsError(f"prediction for unknown instance {pred.instance_id!r}")
    if inst.gold is None:
        raise MetricsError(f"prediction for instance {pred.instance_id!r} without gold")
    return inst.gold


def recall(predictions: list[Prediction], corpus: Corpus) -> float:
    """Fraction of predictions whose set contains at least one gold sense."""
    if not predictions:
        raise MetricsError("no predictions to score")
    instances = _instance_index(corpus)
    hits = sum(1 for p in predictions if p.predicted & _gold_for(p, instances))
    return hits / len(predictions)


def jaccard(predictions: list[Prediction], corpus: Corpus) -> float:
    """Mean |gold ∩ predicted| / |gold ∪ predicted| over predictions.

    An instance with both sets empty contributes 1.0; this cannot occur when
    gold sets are non-empty, but the convention is fixed here.
    """
    if not predictions:
        raise MetricsError("no predictions to score")
    instances = _instance_index(corpus)
    total = 0.0
    for p in predictions:
        gold = _gold_for(p, instances)
        union = gold | p.predicted
        total += (len(gold & p.predicted) / len(union)) if union else 1.0
    return total / len(predictions)


def delta(predictions: list[Prediction], corpus: Corpus, o: Ontology) -> float:
    """Mean normalized predicted-set size minus the single-label baseline.

    Computes mean(|predicted| / |senses|) - mean(1 / |senses|) over the
    predicted instances, where |senses| is the size of each word's candidate
    sense inventory.
    """
    if not predictions:
        raise MetricsError("no predictions to score")
    instances = _instance_index(corpus)
    pred_term = 0.0
    single_term = 0.0
    for p in predictions:
        inst = instances.get(p.instance_id)
        if inst is None:
            raise MetricsError(f"prediction for unknown instance {p.instance_id!r}")
        n_senses = len(o.senses(word_key_of(inst)))
        if n_senses == 0:
            raise MetricsError(f"instance {inst.id}: word has no senses in the ontology")
        pred_term += len(p.predicted) / n_senses
        single_term += 1 / n_senses
    n = len(predictions)
    return pred_term / n - single_term / n


def mcs_baseline(o: Ontology, corpus: Corpus) -> tuple[list[Prediction], list[str]]:
    """Most-common-sense predictions for every gold-bearing instance.

    Returns the predictions plus the ids of instances skipped as OOV.
    """
    predictions = []
    skipped = []
    for inst in corpus.instances:
        if inst.gold is None:
            continue
        top = o.mcs(word_key_of(inst))
        if top is None:
            skipped.append(inst.id)
            continue
        predictions.append(Prediction(instance_id=inst.id, predicted=frozenset([top]),
                                      backoff=BACKOFF_MCS))
    return predictions, skipped


def mcs_lcs_split(predictions: list[Prediction], corpus: Corpus, o: Ontology) -> dict:
    """Recall and Jaccard computed separately for instances whose gold set
    includes the word's most common sense versus those annotated only with a
    less common sense."""
    instances = _instance_index(corpus)
    groups: dict[str, list[Prediction]] = {"mcs": [], "lcs": []}
    for p in predictions:
        inst = instances.get(p.instance_id)
        if inst is None:
            raise MetricsError(f"prediction for unknown instance {p.instance_id!r}")
        gold = _gold_for(p, instances)
        top = o.mcs(word_key_of(inst))
        if top is None:
            raise MetricsError(f"instance {inst.id}: word has no senses in the ontology")
        groups["mcs" if top in gold else "lcs"].append(p)
    out = {}
    for label, preds in groups.items():
        if preds:
            out[label] = {"n": len(preds), "recall": recall(preds, corpus),
                          "jaccard": jaccard(preds, corpus)}
        else:
            out[label] = {"n": 0, "recall": None, "jaccard": None}
    return out


def prediction_language_analysis(
        ranked_pools: list[list[tuple[str, float, frozenset[str]]]]) -> dict[str, float]:
    """Distribution over languages of the top-scoring pooled candidate.

    A top candidate belonging to k languages contributes 1/k to each, so the
    fractions sum to one.
    """
    if not ranked_pools:
        raise MetricsError("no ranked candidate pools")
    counts: dict[str, float] = {}
    for pool in ranked_pools:
        if not pool:
            raise MetricsError("empty candidate pool")
        _, _, languages = pool[0]
        share = 1 / len(languages)
        for lang in languages:
            counts[lang] = counts.get(lang, 0.0) + share
    n = len(ranked_pools)
    return {lang: c / n for lang, c in sorted(counts.items())}


@dataclass
class EvalReport:
    """Per-corpus evaluation summary (the columns of the report tables)."""

    corpus_name: str
    language: str
    n_scored: int
    recall: float
    jaccard: float
    delta: float
    mcs_recall: float | None
    split: dict

    def to_row(self) -> dict:
        return {
            "corpus": self.corpus_name,
            "language": self.language,
            "n_scored": self.n_scored,
            "mcs_recall": self.mcs_recall,
            "recall": self.recall,
            "jaccard": self.jaccard,
            "delta": self.delta,
            "split": self.split,
        }


def evaluate(predictions: list[Prediction], corpus: Corpus, o: Ontology) -> EvalReport:
    """Compute the full per-corpus report for one prediction set."""
    baseline, _ = mcs_baseline(o, corpus)
    return EvalReport(
        corpus_name=corpus.name,
        language=corpus.language,
        n_scored=len(predictions),
        recall=recall(predictions, corpus),
        jaccard=jaccard(predictions, corpus),
        delta=delta(predictions, corpus, o),
        mcs_recall=recall(baseline, corpus) if baseline else None,
        split=mcs_lcs_split(predictions, corpus, o),
    )


def _mean(values) -> float | None:
    values = [v for v in values if v is not None]
    return sum(values) / len(values) if values else None


def wsd_report(rows: list[EvalReport], configuration: dict) -> dict:
    """Assemble the machine-readable report for a disambiguation run.

    The average row is the simple (unweighted) mean across corpora.
    """
    row_dicts = [r.to_row() for r in rows]
    return {
        "kind": "wsd_report",
        "configuration": configuration,
        "rows": row_dicts,
        "average": {
            "mcs_recall": _mean(r["mcs_recall"] for r in row_dicts),
            "recall": _mean(r["recall"] for r in row_dicts),
            "jaccard": _mean(r["jaccard"] for r in row_dicts),
            "delta": _mean(r["delta"] for r in row_dicts),
        },
    }


def ablate_report(rows: list[dict]) -> dict:
    """Assemble the multi-configuration report; one row per configuration."""
    return {"kind": "ablate_report", "rows": rows}


def _fmt(value, percent=True) -> str:
    if value is None:
        return "-"
    return f"{value * 100:.2f}" if percent else str(value)


def _table(headers: list[str], body: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in body)) if body else len(h)
              for i, h in enumerate(headers)]
    def line(cells):
        return "  ".join(c.ljust(w) for c, w in zip(cells, widths)).rstrip()
    rule = "  ".join("-" * w for w in widths)
    return "\n".join([line(headers), rule] + [line(r) for r in body]) + "\n"


def format_wsd_report(report: dict) -> str:
    """Aligned-column text rendering: one row per corpus plus the average."""
    headers = ["Corpus", "Lang", "N", "MCS", "Recall", "Jaccard", "Delta"]
    body = []
    for row in report["rows"]:
        body.append([row["corpus"], row["language"], str(row["n_scored"]),
                     _fmt(row["mcs_recall"]), _fmt(row["recall"]),
                     _fmt(row["jaccard"]), _fmt(row["delta"])])
    avg = report["average"]
    body.append(["Avg.", "", "", _fmt(avg["mcs_recall"]), _fmt(avg["recall"]),
                 _fmt(avg["jaccard"]), _fmt(avg["delta"])])
    return _table(headers, body)


def format_ablate_report(report: dict) -> str:
    headers = ["Targets", "Prompt", "Recall", "Jaccard", "Delta"]
    body = []
    for row in report["rows"]:
        body.append(["+".join(row["targets"]), row["prompt_language_policy"],
                     _fmt(row["recall"]), _fmt(row["jaccard"]), _fmt(row["delta"])])
    return _table(headers, body)


def format_merged_reports(reports: list[dict], labels: list[str]) -> str:
    """Merge several run reports into one table: rows are corpora, columns the
    MCS baseline plus recall and Jaccard per configuration."""
    corpora: list[str] = []
    per_label: dict[str, dict[str, dict]] = {}
    mcs_by_corpus: dict[str, float | None] = {}
    for label, report in zip(labels, reports):
        per_label[label] = {}
        for row in report["rows"]:
            name = row["corpus"]
            if name not in corpora:
                corpora.append(name)
            per_label[label][name] = row
            mcs_by_corpus.setdefault(name, row["mcs_recall"])
    headers = (["Corpus", "MCS"] + [f"R:{l}" for l in labels] + [f"J:{l}" for l in labels])
    body = []
    for name in corpora:
        cells = [name, _fmt(mcs_by_corpus.get(name))]
        cells += [_fmt(per_label[l].get(name, {}).get("recall")) for l in labels]
        cells += [_fmt(per_label[l].get(name, {}).get("jaccard")) for l in labels]
        body.append(cells)
    avg_cells = ["Avg.", _fmt(_mean(mcs_by_corpus.values()))]
    avg_cells += [_fmt(_mean(r.get("recall") for r in per_label[l].values())) for l in labels]
    avg_cells += [_fmt(_mean(r.get("jaccard") for r in per_label[l].values())) for l in labels]
    body.append(avg_cells)
    return _table(headers, body)


def load_report_schema(kind: str) -> dict:
    """The published JSON schema for a report kind ('wsd' or 'ablate')."""
    name = {"wsd": "wsd_report.schema.json", "ablate": "ablate_report.schema.json"}[kind]
    text = resources.files("translex").joinpath(f"data/{name}").read_text("utf-8")
    return json.loads(text)


def write_json(payload: dict, path) -> None:
    Path(path).write_text(json.dumps(payload, ensure_ascii=False, sort_keys=True, indent=2)
                          + "\n", encoding="utf-8")
