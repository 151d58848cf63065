"""Command-line entry point.

Subcommands mirror the collection-building workflow: pool, evaluate,
reliability, audit, serve, stats. Exit codes: 0 success, 1 audit
findings, 2 usage or validation failure. Outputs are deterministic for
identical inputs and seed; tables print floats to 4 decimals, JSON
keeps full precision.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import audit as audit_mod
from . import reliability as rel_mod
from .formats import (
    ParseError,
    parse_manifest,
    parse_qrels,
    parse_run,
    parse_topics,
)
from .judging import load_events
from .measures import (
    DEFAULT_MEASURES,
    evaluate,
    parse_measures,
    write_eval_json,
    write_leaderboard,
    write_scores_csv,
)
from .model import RankedRun, collection_stats, DocRecord
from .pooling import build_pools, overlap_report, parse_pools, write_pools

logger = logging.getLogger(__name__)


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _load_runs(paths: Sequence[str]) -> list[RankedRun]:
    runs = []
    seen = set()
    for path in paths:
        run = parse_run(_read(path))
        if run.system_id in seen:
            raise ValueError(f"duplicate system id {run.system_id!r} from {path}")
        seen.add(run.system_id)
        runs.append(run)
    return runs


def _crawled_map(manifest_path: str) -> dict[str, set[str]]:
    crawled: dict[str, set[str]] = {}
    for entry in parse_manifest(_read(manifest_path)):
        for topic_id in entry.source_topics:
            crawled.setdefault(topic_id, set()).add(entry.doc_id)
    return crawled


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _pool_inputs(args):
    topics = parse_topics(_read(args.topics))
    real_ids = [topic.id for topic in topics if not topic.is_noise]
    noise_ids = {topic.id for topic in topics if topic.is_noise}
    if not real_ids:
        raise ValueError("no judgable topics in the topics file")
    google = parse_run(_read(args.google))
    google_top = {topic_id: google.ranking(topic_id) for topic_id in google.topics()}
    noise_candidates = sorted(
        entry.doc_id
        for entry in parse_manifest(_read(args.manifest))
        if entry.source_topics & noise_ids
    )
    pooling_runs = _load_runs(args.runs)
    return real_ids, pooling_runs, google_top, noise_candidates


def _cmd_pool(args) -> int:
    real_ids, pooling_runs, google_top, noise_candidates = _pool_inputs(args)
    pools = build_pools(
        real_ids,
        pooling_runs,
        google_top,
        noise_candidates,
        k=args.k,
        k_google=args.k_google,
        k_noise=args.k_noise,
        seed=args.seed,
    )
    _emit(write_pools(pools), args.out)
    report = overlap_report(pools)
    lines = ["topic      size  depth  exhausted"]
    for pool in pools:
        lines.append(
            f"{pool.topic_id}  {pool.size:>4}  {pool.depth:>5}  "
            f"{'yes' if pool.exhausted else 'no'}"
        )
    lines.append(f"sum of pool sizes: {report.sum_of_pool_sizes}")
    lines.append(f"unique documents:  {report.unique_docs}")
    for multiplicity, count in report.histogram.items():
        lines.append(f"  in {multiplicity} pool(s): {count}")
    summary = "\n".join(lines) + "\n"
    if args.out in (None, "-"):
        sys.stderr.write(summary)
    else:
        sys.stdout.write(summary)
    return 0


def _cmd_evaluate(args) -> int:
    runs = _load_runs(args.runs)
    qrels = parse_qrels(_read(args.qrels))
    measures = parse_measures(args.measures.split(","))
    crawled = _crawled_map(args.manifest) if args.manifest else None
    result = evaluate(
        runs,
        qrels,
        measures,
        crawled_docs=crawled,
        binary_ndcg=args.binary_ndcg,
    )
    for note in result.diagnostics:
        logger.warning("%s", note)
    if args.format == "json":
        _emit(write_eval_json(result), args.out)
    elif args.format == "csv":
        _emit(write_scores_csv(result), args.out)
    else:
        _emit(write_leaderboard(result), args.out)
    if args.out not in (None, "-") or args.format != "text":
        sys.stderr.write(write_leaderboard(result))
    return 0


def _cmd_reliability(args) -> int:
    systems = _load_runs(args.systems)
    qrels = parse_qrels(_read(args.qrels))
    real_ids, pooling_runs, google_top, noise_candidates = _pool_inputs(args)
    del real_ids
    if (args.max - args.min) % args.step != 0:
        raise ValueError(
            f"step {args.step} does not divide the range {args.min}..{args.max}"
        )
    config = rel_mod.IncrementConfig(
        min_size=args.min,
        max_size=args.max,
        step=args.step,
        k_google=args.k_google,
        k_noise=args.k_noise,
        seed=args.seed,
        measures=tuple(args.measures.split(",")),
        denominator=args.denominator,
        binary_ndcg=args.binary_ndcg,
    )
    crawled = _crawled_map(args.manifest) if args.manifest else None
    table = rel_mod.increment_analysis(
        systems,
        qrels,
        pooling_runs,
        google_top,
        noise_candidates,
        config,
        crawled_docs=crawled,
    )
    for note in table.diagnostics:
        logger.warning("%s", note)
    if args.format == "json":
        _emit(rel_mod.write_increment_json(table), args.out)
    elif args.format == "csv":
        _emit(rel_mod.write_increment_csv(table), args.out)
    else:
        _emit(rel_mod.write_increment_table(table), args.out)
    return 0


def _cmd_audit(args) -> int:
    if (args.qrels is None) == (args.log is None):
        raise ValueError("exactly one of --qrels or --log is required")
    if args.qrels is not None:
        judgments = parse_qrels(_read(args.qrels))
    else:
        judgments = load_events(_read(args.log))
    pools = parse_pools(_read(args.pools))
    noise_by_topic = {
        pool.topic_id: pool.noise_doc_ids()
        for pool in pools
        if pool.noise_doc_ids()
    }
    report = audit_mod.noise_audit(
        judgments, noise_by_topic, flag_threshold=args.threshold
    )
    if args.format == "json":
        _emit(audit_mod.write_audit_json(report), args.out)
    else:
        _emit(audit_mod.write_audit_text(report), args.out)
    return 1 if report.flags else 0


def _cmd_serve(args) -> int:
    from .service import load_config, serve

    config = load_config(args.config)
    serve(config, port=args.port)
    return 0


def _cmd_stats(args) -> int:
    entries = parse_manifest(_read(args.manifest))
    root = Path(args.docs_root)
    docs = []
    for entry in entries:
        raw = (root / entry.path).read_bytes()
        docs.append(
            DocRecord(
                doc_id=entry.doc_id,
                source_topics=entry.source_topics,
                content=raw,
            )
        )
    stats = collection_stats(docs)
    if args.format == "json":
        payload = {
            "doc_count": stats.doc_count,
            "total_bytes": stats.total_bytes,
            "words_per_doc": {
                "mean": stats.words_per_doc.mean,
                "median": stats.words_per_doc.median,
            },
            "bytes_per_doc": {
                "mean": stats.bytes_per_doc.mean,
                "median": stats.bytes_per_doc.median,
            },
            "per_topic_downloads": dict(sorted(stats.per_topic_downloads.items())),
        }
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        lines = ["topic      downloads"]
        for topic_id, count in sorted(stats.per_topic_downloads.items()):
            lines.append(f"{topic_id}  {count:>9}")
        lines.append(f"documents:   {stats.doc_count}")
        lines.append(f"total bytes: {stats.total_bytes}")
        lines.append(
            f"words/doc:   mean {stats.words_per_doc.mean:.4f} "
            f"median {stats.words_per_doc.median:.4f}"
        )
        lines.append(
            f"bytes/doc:   mean {stats.bytes_per_doc.mean:.4f} "
            f"median {stats.bytes_per_doc.median:.4f}"
        )
        _emit("\n".join(lines) + "\n", args.out)
    return 0


def _add_pool_inputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--topics", required=True, help="topics XML file")
    parser.add_argument("--manifest", required=True, help="document manifest TSV")
    parser.add_argument(
        "--google", required=True, help="search-engine results in run format"
    )
    parser.add_argument(
        "--runs", nargs="+", required=True, help="pooling system run files"
    )
    parser.add_argument("--k-google", type=int, default=10)
    parser.add_argument("--k-noise", type=int, default=10)
    parser.add_argument(
        "--seed", type=int, required=True, help="seed for noise sampling and shuffles"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pooleval",
        description="Judging pools, graded judgments, and retrieval evaluation.",
    )
    parser.add_argument("--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    pool = sub.add_parser("pool", help="build judging pools")
    _add_pool_inputs(pool)
    pool.add_argument("--k", type=int, default=100, help="target pool size")
    pool.add_argument("--out", help="pool manifest path (default stdout)")
    pool.set_defaults(func=_cmd_pool)

    ev = sub.add_parser("evaluate", help="score runs against qrels")
    ev.add_argument("--runs", nargs="+", required=True, help="run files to score")
    ev.add_argument("--qrels", required=True)
    ev.add_argument(
        "--measures",
        default=",".join(DEFAULT_MEASURES),
        help="comma-separated measure specs, e.g. ndcg@100,p@10,rr",
    )
    ev.add_argument("--manifest", help="manifest TSV enabling coverage measures")
    ev.add_argument("--binary-ndcg", action="store_true")
    ev.add_argument("--format", choices=("text", "csv", "json"), default="text")
    ev.add_argument("--out")
    ev.set_defaults(func=_cmd_evaluate)

    rel = sub.add_parser("reliability", help="nested-pool increment analysis")
    rel.add_argument("--systems", nargs="+", required=True, help="run files to score")
    rel.add_argument("--qrels", required=True)
    _add_pool_inputs(rel)
    rel.add_argument("--min", type=int, default=20)
    rel.add_argument("--max", type=int, default=100)
    rel.add_argument("--step", type=int, default=5)
    rel.add_argument(
        "--measures", default=",".join(DEFAULT_MEASURES), help="comma-separated specs"
    )
    rel.add_argument("--denominator", choices=("smaller", "larger"), default="smaller")
    rel.add_argument("--binary-ndcg", action="store_true")
    rel.add_argument("--format", choices=("text", "csv", "json"), default="text")
    rel.add_argument("--out")
    rel.set_defaults(func=_cmd_reliability)

    aud = sub.add_parser("audit", help="noise-document judgment audit")
    aud.add_argument("--qrels", help="judged qrels file")
    aud.add_argument("--log", help="judgment event log (JSON lines)")
    aud.add_argument("--pools", required=True, help="pool manifest file")
    aud.add_argument("--threshold", type=float, default=audit_mod.DEFAULT_FLAG_THRESHOLD)
    aud.add_argument("--format", choices=("text", "json"), default="text")
    aud.add_argument("--out")
    aud.set_defaults(func=_cmd_audit)

    srv = sub.add_parser("serve", help="run the judging service")
    srv.add_argument("--config", required=True, help="service config JSON")
    srv.add_argument("--port", type=int, help="override config port (0 = ephemeral)")
    srv.set_defaults(func=_cmd_serve)

    st = sub.add_parser("stats", help="collection statistics")
    st.add_argument("--manifest", required=True)
    st.add_argument("--docs-root", required=True)
    st.add_argument("--format", choices=("text", "json"), default="text")
    st.add_argument("--out")
    st.set_defaults(func=_cmd_stats)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
