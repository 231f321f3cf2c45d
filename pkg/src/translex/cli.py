"""Command-line entry point wiring the toolkit into reproducible runs.

Every run writes its outputs plus a ``run.json`` capturing the resolved
configuration, the seed, and the tool version; re-running a command from
that file with the same deterministic scorer reproduces the output files
byte for byte.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, cwlt, metrics, wsd
from .corpora import (Corpus, CorpusError, load_alternate_gold, parse_jsonl_corpus,
                      parse_xml_corpus)
from .ontology import Ontology, load_ontology, surface_text
from .prompting import WITH_CONTEXT, WITHOUT_CONTEXT, load_templates
from .scoring import Scorer, ScorerConfig, ScoringError
from .wsd import EnsembleConfig, word_key_of


class CliError(ValueError):
    pass


_ERRORS = (ValueError, ScoringError, OSError)


def _add_scorer_flags(parser):
    group = parser.add_argument_group("scorer")
    group.add_argument("--scorer", choices=["http", "mock-table", "mock-oracle"],
                       default="http")
    group.add_argument("--endpoint", help="base URL of the scoring server (http backend)")
    group.add_argument("--normalization", choices=["sum", "mean"], default="sum")
    group.add_argument("--max-in-flight", type=int, default=1)
    group.add_argument("--timeout", type=float, default=30.0)
    group.add_argument("--retries", type=int, default=2)
    group.add_argument("--table", help="JSON file mapping continuation -> NLL (mock-table)")
    group.add_argument("--table-default", type=float,
                       help="NLL for continuations missing from the table")
    group.add_argument("--oracle-inverted", action="store_true",
                       help="swap the oracle's good/bad values")


def _add_common_flags(parser):
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--templates", help="template JSONL overriding the shipped defaults")


def _add_wsd_flags(parser):
    parser.add_argument("--targets", default="en,zh,ru",
                        help="comma-separated target languages")
    parser.add_argument("--prompt-lang", choices=["english", "source", "target"],
                        default="english")
    parser.add_argument("--backoff-english", choices=["on", "off"], default="on")
    parser.add_argument("--final-backoff", choices=["mcs", "empty"], default="mcs")
    parser.add_argument("--alternate-gold",
                        help="key file replacing gold labels for the named instances")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="translex",
        description="Contextual word-level translation scoring and "
                    "translation-based sense disambiguation.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("build-cwlt", help="build a translation benchmark dataset")
    p.add_argument("--ontology", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--n-random-negatives", type=int, default=50)
    _add_common_flags(p)

    p = sub.add_parser("run-cwlt", help="score a translation benchmark dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--modes", choices=["both", "with_context", "without_context"],
                   default="both")
    _add_common_flags(p)
    _add_scorer_flags(p)

    p = sub.add_parser("run-wsd", help="disambiguate a corpus via translation")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True, action="append",
                   help="corpus file (.xml or .jsonl); repeatable")
    p.add_argument("--key", help="gold key file (single XML corpus only)")
    p.add_argument("--baseline", choices=["mcs"],
                   help="skip scoring and run the named baseline")
    p.add_argument("--language-analysis", action="store_true",
                   help="add the top-1 prediction language distribution to the report")
    _add_wsd_flags(p)
    _add_common_flags(p)
    _add_scorer_flags(p)

    p = sub.add_parser("ablate", help="sweep target-set and prompt-language settings")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True, action="append")
    p.add_argument("--key")
    p.add_argument("--prompt-langs", default="english",
                   help="comma-separated subset of english,source,target")
    _add_wsd_flags(p)
    _add_common_flags(p)
    _add_scorer_flags(p)

    p = sub.add_parser("mcs-baseline", help="most-common-sense baseline")
    p.add_argument("--ontology", required=True)
    p.add_argument("--corpus", required=True, action="append")
    p.add_argument("--key")
    p.add_argument("--alternate-gold")
    _add_common_flags(p)

    p = sub.add_parser("report", help="merge run reports into one table")
    p.add_argument("--input", required=True, action="append",
                   help="report.json from a run; repeatable")
    p.add_argument("--label", action="append",
                   help="column label per input (defaults to the file stem)")
    p.add_argument("--out", help="optional directory for the merged table")
    return parser


def _load_corpora(args) -> list[Corpus]:
    paths = [Path(p) for p in args.corpus]
    if args.key and len(paths) > 1:
        raise CliError("--key applies only when a single corpus is given")
    corpora = []
    for path in paths:
        if path.suffix == ".xml":
            key = Path(args.key) if args.key else _discover_key(path)
            corpora.append(parse_xml_corpus(path, key))
        else:
            corpora.append(parse_jsonl_corpus(path))
    if getattr(args, "alternate_gold", None):
        if len(corpora) > 1:
            raise CliError("--alternate-gold applies only when a single corpus is given")
        corpora = [load_alternate_gold(corpora[0], Path(args.alternate_gold))]
    return corpora


def _discover_key(data_path: Path) -> Path | None:
    candidates = []
    if data_path.name.endswith(".data.xml"):
        candidates.append(data_path.with_name(
            data_path.name.replace(".data.xml", ".gold.key.txt")))
    candidates.append(data_path.with_suffix(".key.txt"))
    candidates.append(data_path.with_suffix(".key"))
    for c in candidates:
        if c.exists():
            return c
    return None


def _load_templates(args):
    templates = load_templates()
    if getattr(args, "templates", None):
        templates.update(load_templates(Path(args.templates)))
    return templates


def _load_table_file(path: Path) -> tuple[dict, tuple]:
    """Read a mock-table file: either a flat continuation->NLL object, or
    ``{"table": {...}, "rules": [{"match": <prefix fragment>, "table": {...}}]}``."""
    payload = json.loads(path.read_text(encoding="utf-8"))
    if not isinstance(payload, dict):
        raise CliError("--table file must hold a JSON object")
    if "rules" in payload or "table" in payload:
        rules = tuple((r["match"], {k: float(v) for k, v in r["table"].items()})
                      for r in payload.get("rules", []))
        table = {k: float(v) for k, v in payload.get("table", {}).items()}
        return table, rules
    return {k: float(v) for k, v in payload.items()}, ()


def _build_scorer(args, oracle_good: frozenset[str] = frozenset(),
                  oracle_rules: tuple = ()) -> Scorer:
    backend = args.scorer.replace("-", "_")
    table, table_rules = ({}, ())
    if args.table:
        table, table_rules = _load_table_file(Path(args.table))
    if backend == "mock_oracle" and not oracle_good and not oracle_rules:
        raise CliError("mock-oracle scorer needs gold annotations to build its good set")
    config = ScorerConfig(
        backend=backend,
        endpoint=args.endpoint,
        max_in_flight=args.max_in_flight,
        normalization=args.normalization,
        timeout=args.timeout,
        retries=args.retries,
        table=table,
        table_default=args.table_default,
        table_rules=table_rules,
        oracle_good=oracle_good,
        oracle_rules=oracle_rules,
        oracle_inverted=args.oracle_inverted,
    )
    return Scorer(config)


def _oracle_rules_for_corpora(o: Ontology, corpora: list[Corpus],
                              languages: list[str], templates,
                              policies: list[str]) -> tuple:
    """Per-instance oracle rules: the rendered prompt prefix for each
    (instance, target language) maps to the exact continuations of the
    instance's gold-sense translations, so those candidates score low."""
    rules = []
    for corpus in corpora:
        for inst in corpus.instances:
            if not inst.gold:
                continue
            w = word_key_of(inst)
            for lang in languages:
                trans = o.translations(w, lang)
                good_surfaces = [s for s, senses in trans.items()
                                 if senses & inst.gold]
                if not good_surfaces:
                    continue
                for policy in policies:
                    prompt_lang = (lang if policy == "target" else
                                   inst.language if policy == "source" else "en")
                    template = templates.get((prompt_lang, WITH_CONTEXT))
                    if template is None:
                        continue
                    prompt = render(template, inst, lang)
                    goods = frozenset(prompt.continuation(surface_text(s))
                                      for s in good_surfaces)
                    rules.append((prompt.prefix, goods))
    return tuple(rules)




def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_run_file(out: Path, args, argv: list[str]) -> None:
    resolved = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    payload = {"subcommand": args.subcommand, "argv": argv, "args": resolved,
               "seed": getattr(args, "seed", None), "version": __version__}
    metrics.write_json(payload, out / "run.json")


def cmd_build_cwlt(args, argv) -> int:
    out = _out_dir(args)
    o = load_ontology(Path(args.ontology))
    build = cwlt.build_dataset(o, args.source, args.target,
                               n_random_negatives=args.n_random_negatives,
                               seed=args.seed)
    cwlt.write_dataset(build, out / "dataset.jsonl")
    _write_run_file(out, args, argv)
    print(f"wrote {len(build.examples)} examples to {out / 'dataset.jsonl'}")
    return 0


def cmd_run_cwlt(args, argv) -> int:
    out = _out_dir(args)
    manifest, examples = cwlt.read_dataset(Path(args.dataset))
    templates = _load_templates(args)
    scorer = _build_scorer(
        args, oracle_rules=cwlt.oracle_rules_for_examples(examples, templates))
    modes = ([WITH_CONTEXT, WITHOUT_CONTEXT] if args.modes == "both" else [args.modes])

    results = {}
    summary = {"dataset_manifest": manifest, "n_examples": len(examples),
               "top1_accuracy": {}, "all_translations_accuracy": {}, "nll_stats": {}}
    for mode in modes:
        mode_results = cwlt.run_cwlt(examples, templates, scorer, mode)
        results[mode] = mode_results
        cwlt.write_results(mode_results, out / f"results_{mode}.jsonl")
        summary["top1_accuracy"][mode] = cwlt.top1_accuracy(mode_results)
        summary["all_translations_accuracy"][mode] = cwlt.all_translations_accuracy(mode_results)
        summary["nll_stats"][mode] = cwlt.nll_stats(mode_results)
    if args.modes == "both":
        summary["error_reduction"] = cwlt.error_reduction(
            results[WITHOUT_CONTEXT], results[WITH_CONTEXT])
    metrics.write_json(summary, out / "metrics.json")
    _write_run_file(out, args, argv)
    print(f"scored {len(examples)} examples in modes {', '.join(modes)}")
    return 0


def _ensemble_config(args) -> EnsembleConfig:
    targets = tuple(t for t in args.targets.split(",") if t)
    return EnsembleConfig(targets=targets,
                          prompt_language_policy=args.prompt_lang,
                          backoff_to_english=args.backoff_english == "on",
                          final_backoff=args.final_backoff)


def cmd_run_wsd(args, argv) -> int:
    out = _out_dir(args)
    o = load_ontology(Path(args.ontology))
    corpora = _load_corpora(args)
    config = _ensemble_config(args)
    templates = _load_templates(args)

    rows = []
    run_reports = []
    if args.baseline == "mcs":
        for corpus in corpora:
            predictions, skipped = metrics.mcs_baseline(o, corpus)
            wsd.write_predictions(predictions, out / f"predictions_{corpus.name}.jsonl")
            rows.append(metrics.evaluate(predictions, corpus, o))
            run_reports.append({"corpus": corpus.name, "predicted": len(predictions),
                                "skipped_oov": len(skipped)})
    else:
        scorer = _build_scorer(args, oracle_rules=_oracle_rules_for_corpora(
            o, corpora, list(config.targets) + ["en"]))
        for corpus in corpora:
            predictions, run_report = wsd.predict_corpus(o, corpus, config, templates,
                                                         scorer)
            wsd.write_predictions(predictions, out / f"predictions_{corpus.name}.jsonl")
            row = metrics.evaluate(predictions, corpus, o)
            if args.language_analysis:
                pools = wsd.language_pool_rankings(
                    o, corpus,
                    prompt_language=_analysis_prompt_language(config, corpus),
                    target=config.targets[0], templates=templates, scorer=scorer)
                run_report["prediction_language_distribution"] = (
                    metrics.prediction_language_analysis(pools))
            rows.append(row)
            run_reports.append(run_report)

    report = metrics.wsd_report(rows, _configuration_dict(args))
    metrics.write_json(report, out / "report.json")
    (out / "report.txt").write_text(metrics.format_wsd_report(report), encoding="utf-8")
    metrics.write_json({"runs": run_reports}, out / "run_report.json")
    _write_run_file(out, args, argv)
    print(metrics.format_wsd_report(report), end="")
    return 0


def _analysis_prompt_language(config: EnsembleConfig, corpus: Corpus) -> str:
    if config.prompt_language_policy == "english":
        return "en"
    if config.prompt_language_policy == "source":
        return corpus.language
    return config.targets[0]


def _configuration_dict(args) -> dict:
    return {
        "targets": [t for t in args.targets.split(",") if t],
        "prompt_language_policy": args.prompt_lang,
        "backoff_to_english": args.backoff_english == "on",
        "final_backoff": args.final_backoff,
        "baseline": getattr(args, "baseline", None),
    }


def _subsets(items: tuple[str, ...]):
    """Non-empty subsets, smallest first, ordered by the original item order."""
    n = len(items)
    masked = [(mask, tuple(items[i] for i in range(n) if mask & (1 << i)))
              for mask in range(1, 2 ** n)]
    masked.sort(key=lambda ms: (len(ms[1]), ms[0]))
    return [subset for _, subset in masked]


def cmd_ablate(args, argv) -> int:
    out = _out_dir(args)
    o = load_ontology(Path(args.ontology))
    corpora = _load_corpora(args)
    templates = _load_templates(args)
    all_targets = tuple(t for t in args.targets.split(",") if t)
    policies = [p for p in args.prompt_langs.split(",") if p]
    for policy in policies:
        if policy not in ("english", "source", "target"):
            raise CliError(f"unknown prompt language policy {policy!r}")

    # one scorer for the whole sweep, so repeated prompts hit the cache
    scorer = _build_scorer(args, oracle_rules=_oracle_rules_for_corpora(
        o, corpora, list(all_targets) + ["en"]))

    rows = []
    for policy in policies:
        for subset in _subsets(all_targets):
            config = EnsembleConfig(targets=subset, prompt_language_policy=policy,
                                    backoff_to_english=args.backoff_english == "on",
                                    final_backoff=args.final_backoff)
            per_corpus = []
            for corpus in corpora:
                predictions, _ = wsd.predict_corpus(o, corpus, config, templates, scorer)
                report = metrics.evaluate(predictions, corpus, o)
                per_corpus.append({"corpus": corpus.name, "recall": report.recall,
                                   "jaccard": report.jaccard, "delta": report.delta})
            def mean(key):
                vals = [r[key] for r in per_corpus]
                return sum(vals) / len(vals) if vals else None
            rows.append({
                "targets": list(subset),
                "prompt_language_policy": policy,
                "recall": mean("recall"),
                "jaccard": mean("jaccard"),
                "delta": mean("delta"),
                "per_corpus": per_corpus,
            })

    report = metrics.ablate_report(rows)
    metrics.write_json(report, out / "ablate.json")
    (out / "ablate.txt").write_text(metrics.format_ablate_report(report), encoding="utf-8")
    _write_run_file(out, args, argv)
    print(metrics.format_ablate_report(report), end="")
    return 0


def cmd_mcs_baseline(args, argv) -> int:
    out = _out_dir(args)
    o = load_ontology(Path(args.ontology))
    corpora = _load_corpora(args)
    rows = []
    for corpus in corpora:
        predictions, skipped = metrics.mcs_baseline(o, corpus)
        wsd.write_predictions(predictions, out / f"predictions_{corpus.name}.jsonl")
        rows.append(metrics.evaluate(predictions, corpus, o))
    report = metrics.wsd_report(rows, {"targets": [], "prompt_language_policy": "english",
                                       "baseline": "mcs"})
    metrics.write_json(report, out / "report.json")
    (out / "report.txt").write_text(metrics.format_wsd_report(report), encoding="utf-8")
    _write_run_file(out, args, argv)
    print(metrics.format_wsd_report(report), end="")
    return 0


def cmd_report(args, argv) -> int:
    paths = [Path(p) for p in args.input]
    labels = args.label or [p.parent.name or p.stem for p in paths]
    if len(labels) != len(paths):
        raise CliError("--label must be given once per --input")
    reports = [json.loads(p.read_text(encoding="utf-8")) for p in paths]
    table = metrics.format_merged_reports(reports, labels)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "merged.txt").write_text(table, encoding="utf-8")
    print(table, end="")
    return 0


_COMMANDS = {
    "build-cwlt": cmd_build_cwlt,
    "run-cwlt": cmd_run_cwlt,
    "run-wsd": cmd_run_wsd,
    "ablate": cmd_ablate,
    "mcs-baseline": cmd_mcs_baseline,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.subcommand](args, argv)
    except _ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
