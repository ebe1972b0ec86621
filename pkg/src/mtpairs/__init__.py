"""Pairwise system-ranking reliability analysis for MT evaluation metrics.

The package answers one question about an automatic metric: when two systems
are compared, how often does the metric's score difference point the same way
as human judgements? Everything else — significance filtering, bootstrap tie
clusters, metric significance tests, quadrant analysis, correlation
aggregation — is built on that pairwise view.

Typical use::

    from mtpairs import load_collection, build_delta_records, accuracy_table

    collection = load_collection("wmt.jsonl")
    records = build_delta_records(collection)
    table = accuracy_table(records, ["bleu", "chrf"], collection.alphas)
"""
from .data import (
    Campaign,
    Collection,
    CollectionBuilder,
    CollectionError,
    CoverageViolation,
    Judgement,
    MetricScoreSet,
    ReferentialViolation,
    SchemaViolation,
    Segment,
    SystemOutput,
    SystemPair,
    collection_hash,
    enumerate_pairs,
    load_collection,
    merge_external_scores,
    parse_collection_lines,
    read_external_scores,
    serialize_collection,
)
from .human import (
    PairedDifferences,
    TestOutcome,
    human_system_score,
    in_within_band,
    paired_differences,
    significance_band,
    wilcoxon_signed_rank,
)
from .meta import CorrelationObservation, hunter_schmidt, read_correlations_tsv
from .metrics import (
    BUILTIN_METRICS,
    StatsBlock,
    corpus_bleu,
    corpus_chrf,
    corpus_ter,
    score_collection,
    score_system,
    stats_for_lines,
    stats_lookup_for_metric,
    with_builtin_scores,
)
from .pairwise import (
    AccuracyResult,
    AccuracyTable,
    DeltaRecord,
    MissingScoreWarning,
    accuracy,
    accuracy_table,
    accuracy_table_for_specs,
    build_delta_records,
    delta_correlations,
    pearson,
    scatter_points,
    spearman,
)
from .pipeline import PipelineStageError, run_pipeline
from .report import (
    RunManifest,
    render_accuracy_table,
    render_correlation_table,
    render_quadrant_table,
    render_rows,
)
from .resampling import (
    DEFAULT_SEED,
    ClusterReport,
    QuadrantReport,
    ResampleConfig,
    bootstrap_accuracy_clusters,
    paired_bootstrap_metric_test,
    quadrant_analysis,
)
from .subsets import (
    SubsetSpec,
    UnknownTagWarning,
    filter_pairs,
    parse_subset_spec,
    subset_fingerprint,
)
from .tokenization import (
    CJK_CHAR_SCHEME,
    DEFAULT_SCHEME,
    TokenizationScheme,
    scheme_for_language,
    tokenize,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # data model
    "Campaign",
    "Collection",
    "CollectionBuilder",
    "CollectionError",
    "CoverageViolation",
    "Judgement",
    "MetricScoreSet",
    "ReferentialViolation",
    "SchemaViolation",
    "Segment",
    "SystemOutput",
    "SystemPair",
    "collection_hash",
    "enumerate_pairs",
    "load_collection",
    "merge_external_scores",
    "parse_collection_lines",
    "read_external_scores",
    "serialize_collection",
    # human judgements
    "PairedDifferences",
    "TestOutcome",
    "human_system_score",
    "in_within_band",
    "paired_differences",
    "significance_band",
    "wilcoxon_signed_rank",
    # metrics
    "BUILTIN_METRICS",
    "StatsBlock",
    "corpus_bleu",
    "corpus_chrf",
    "corpus_ter",
    "score_collection",
    "score_system",
    "stats_for_lines",
    "stats_lookup_for_metric",
    "with_builtin_scores",
    # pairwise analysis
    "AccuracyResult",
    "AccuracyTable",
    "DeltaRecord",
    "MissingScoreWarning",
    "accuracy",
    "accuracy_table",
    "accuracy_table_for_specs",
    "build_delta_records",
    "delta_correlations",
    "pearson",
    "scatter_points",
    "spearman",
    # subsets
    "SubsetSpec",
    "UnknownTagWarning",
    "filter_pairs",
    "parse_subset_spec",
    "subset_fingerprint",
    # resampling
    "DEFAULT_SEED",
    "ClusterReport",
    "QuadrantReport",
    "ResampleConfig",
    "bootstrap_accuracy_clusters",
    "paired_bootstrap_metric_test",
    "quadrant_analysis",
    # meta-analysis
    "CorrelationObservation",
    "hunter_schmidt",
    "read_correlations_tsv",
    # reporting
    "RunManifest",
    "render_accuracy_table",
    "render_correlation_table",
    "render_quadrant_table",
    "render_rows",
    # pipeline
    "PipelineStageError",
    "run_pipeline",
    # tokenization
    "CJK_CHAR_SCHEME",
    "DEFAULT_SCHEME",
    "TokenizationScheme",
    "scheme_for_language",
    "tokenize",
]
