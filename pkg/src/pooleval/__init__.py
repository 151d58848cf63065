"""Test-collection toolkit: pooled judging sets, graded judgments, and
retrieval effectiveness evaluation.

The pipeline runs topics -> pools -> judgments -> qrels -> scores:
build size-k pools seeded with search-engine and noise documents, serve
them to assessors through the judging service, audit the judgments via
the noise documents, evaluate runs with ranked-retrieval measures, and
check how stable the scores are as the pools shrink.
"""

from .audit import AuditFlag, AuditReport, NoiseCell, noise_audit
from .cleaning import clean_document, extract_text, word_count
from .formats import (
    ManifestEntry,
    ParseError,
    RunFormatWarning,
    parse_manifest,
    parse_qrels,
    parse_run,
    parse_topics,
    write_manifest,
    write_qrels,
    write_run,
    write_topics,
)
from .judging import (
    EventLog,
    JudgmentEvent,
    export_qrels,
    export_qrels_by_assessor,
    load_events,
)
from .measures import (
    DEFAULT_MEASURES,
    EvalResult,
    MeasureSpec,
    MeasureSummary,
    SystemResult,
    UndefinedScoreError,
    average_precision_at_k,
    coverage_at_k,
    evaluate,
    leaderboard,
    ndcg_at_k,
    parse_measure,
    parse_measures,
    precision_at_k,
    recall_at_k,
    reciprocal_rank,
)
from .model import (
    GRADES,
    CollectionStats,
    DocRecord,
    Qrels,
    RankedRun,
    Topic,
    collection_stats,
    conflate_binary,
)
from .pooling import (
    OverlapReport,
    Pool,
    PoolEntry,
    biased_collection,
    build_pool,
    build_pools,
    overlap_report,
    parse_pools,
    pool_union_at_depth,
    write_pools,
)
from .reliability import (
    IncrementConfig,
    IncrementRow,
    IncrementTable,
    increment_analysis,
    nested_pools,
    restrict_qrels,
    restrict_qrels_to_pools,
)
from .synthetic import SyntheticCollection, make_collection, materialize

__version__ = "0.1.0"

__all__ = [
    "AuditFlag",
    "AuditReport",
    "NoiseCell",
    "noise_audit",
    "clean_document",
    "extract_text",
    "word_count",
    "ManifestEntry",
    "ParseError",
    "RunFormatWarning",
    "parse_manifest",
    "parse_qrels",
    "parse_run",
    "parse_topics",
    "write_manifest",
    "write_qrels",
    "write_run",
    "write_topics",
    "EventLog",
    "JudgmentEvent",
    "export_qrels",
    "export_qrels_by_assessor",
    "load_events",
    "DEFAULT_MEASURES",
    "EvalResult",
    "MeasureSpec",
    "MeasureSummary",
    "SystemResult",
    "UndefinedScoreError",
    "average_precision_at_k",
    "coverage_at_k",
    "evaluate",
    "leaderboard",
    "ndcg_at_k",
    "parse_measure",
    "parse_measures",
    "precision_at_k",
    "recall_at_k",
    "reciprocal_rank",
    "GRADES",
    "CollectionStats",
    "DocRecord",
    "Qrels",
    "RankedRun",
    "Topic",
    "collection_stats",
    "conflate_binary",
    "OverlapReport",
    "Pool",
    "PoolEntry",
    "biased_collection",
    "build_pool",
    "build_pools",
    "overlap_report",
    "parse_pools",
    "pool_union_at_depth",
    "write_pools",
    "IncrementConfig",
    "IncrementRow",
    "IncrementTable",
    "increment_analysis",
    "nested_pools",
    "restrict_qrels",
    "restrict_qrels_to_pools",
    "SyntheticCollection",
    "make_collection",
    "materialize",
    "__version__",
]
