"""Contextual word-level translation scoring and translation-based WSD."""

__version__ = "0.1.0"

from .corpora import Corpus, WsdInstance, load_alternate_gold, parse_jsonl_corpus, parse_xml_corpus
from .ontology import Ontology, Synset, WordKey, load_ontology
from .prompting import PromptTemplate, RenderedPrompt, load_templates, render
from .scoring import ScoreRequest, ScoreResult, Scorer, ScorerConfig
from .wsd import EnsembleConfig, Prediction, disambiguate_ensemble, disambiguate_single, predict_corpus

__all__ = [
    "__version__",
    "Corpus", "WsdInstance", "load_alternate_gold", "parse_jsonl_corpus", "parse_xml_corpus",
    "Ontology", "Synset", "WordKey", "load_ontology",
    "PromptTemplate", "RenderedPrompt", "load_templates", "render",
    "ScoreRequest", "ScoreResult", "Scorer", "ScorerConfig",
    "EnsembleConfig", "Prediction", "disambiguate_ensemble", "disambiguate_single",
    "predict_corpus",
]
