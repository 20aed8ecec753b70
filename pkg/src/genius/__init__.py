"""Scenario retrieval engine for vehicle log data.

Pipeline: segment signal/video logs into fixed-length scenarios, render
them as text via signal rules plus an optional vision describer, embed the
descriptions into unit-norm vectors, and answer natural-language queries by
ranked squared-Euclidean distance. Ships a retrieval-quality evaluation
suite, a CLI, and an HTTP query service.
"""

from .describe import (
    ScenarioDescription,
    SignalRule,
    StubVisionDescriber,
    TemplateCombiner,
    combine,
    describe_frame,
    describe_scenario,
    describe_signals,
    parse_rules,
)
from .embed import HashingEmbedder, batch_embed, embed, squared_distance, tokenize
from .evaluate import (
    DistanceProfile,
    ModelComparisonReport,
    RetrievalReport,
    arlg,
    arlg_classify,
    distance_curves,
    model_comparison,
    model_comparison_with_outliers,
    profile_from_result,
    retrieval_metrics,
    z_score_validate,
)
from .ingest import LogManifest, Scenario, SignalLog, load_log, load_manifest, segment
from .retrieve import QueryResult, RankedScenario, search
from .store import Collection, EmbeddedRecord, load, save

__version__ = "0.1.0"

__all__ = [
    "Collection",
    "DistanceProfile",
    "EmbeddedRecord",
    "HashingEmbedder",
    "LogManifest",
    "ModelComparisonReport",
    "QueryResult",
    "RankedScenario",
    "RetrievalReport",
    "Scenario",
    "ScenarioDescription",
    "SignalLog",
    "SignalRule",
    "StubVisionDescriber",
    "TemplateCombiner",
    "arlg",
    "arlg_classify",
    "batch_embed",
    "combine",
    "describe_frame",
    "describe_scenario",
    "describe_signals",
    "distance_curves",
    "embed",
    "load",
    "load_log",
    "load_manifest",
    "model_comparison",
    "model_comparison_with_outliers",
    "parse_rules",
    "profile_from_result",
    "retrieval_metrics",
    "save",
    "search",
    "segment",
    "squared_distance",
    "tokenize",
    "z_score_validate",
]
